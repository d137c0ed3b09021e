#include "corrdet/correlator_design.hpp"

#include "corrdet/errors.hpp"
#include "corrdet/optimize.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace corrdet {

namespace {

using boost::math::tools::eps_tolerance;
using boost::math::tools::toms748_solve;

void require_positive_lambda(double lambda)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("lambda must be > 0");
}

// sqrt(E{S^2} / P_w) / sigma_N^2: natural scale of the Chernoff parameter.
double lambda_scale(const SignalAtoms& signal, const PowerBudget& budget)
{
    return std::sqrt(signal.second_moment() / budget.p_w) / budget.var_n;
}

// Grid-then-golden maximization of a (possibly non-concave) function of
// lambda. Ties go to the smallest lambda.
template <class F>
ScalarMax search_lambda(F&& value, double scale)
{
    const auto grid = logspace(1e-6 * scale, 1e2 * scale, 200);
    std::size_t best = 0;
    double best_value = value(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = value(grid[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    auto refined = golden_section_max(value, lo, hi);
    if (refined.value <= best_value) {
        refined.x = grid[best];
        refined.value = best_value;
    }
    return refined;
}

double design_value(const NoiseModel& model, const SignalAtoms& cells, const Eigen::ArrayXd& w, double lambda,
                    double theta, double var_n)
{
    double v = -lambda * theta;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double p = cells.weight()[i];
        if (p == 0.0)
            continue;
        v += p * (lambda * cells.s()[i] * w[i] - cgf_eval(model, lambda * w[i]) -
                  0.5 * lambda * lambda * var_n * w[i] * w[i]);
    }
    return v;
}

void require_signal(const SignalAtoms& signal)
{
    if (!(signal.second_moment() > 0.0))
        throw DegenerateSignal("signal has zero power");
}

}  // namespace

double g_eval(const NoiseModel& model, double w, double rho, double lambda, double var_n)
{
    require_positive_lambda(lambda);
    return cgf_deriv(model, lambda * w) + (rho / lambda + var_n * lambda) * w;
}

double g_inverse(const NoiseModel& model, double s, double rho, double lambda, double var_n)
{
    require_positive_lambda(lambda);
    if (s == 0.0)
        return 0.0;
    const double target = std::abs(s);
    // g(w) >= (rho/lambda + sigma_N^2 lambda) w on w >= 0, so the root lies below target / slope.
    double hi = target / (rho / lambda + var_n * lambda);
    const double w_lim = cgf_limit(model) / lambda;
    if (hi >= w_lim)
        hi = w_lim * (1.0 - 1e-12);
    auto f = [&](double w) { return g_eval(model, w, rho, lambda, var_n) - target; };
    const double f_hi = f(hi);
    double root = hi;
    if (f_hi > 0.0) {
        std::uintmax_t iters = 200;
        const auto bracket = toms748_solve(f, 0.0, hi, -target, f_hi, eps_tolerance<double>(52), iters);
        const double a = bracket.first, b = bracket.second;
        root = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    }
    return std::copysign(root, s);
}

Eigen::ArrayXd optimal_weights(const NoiseModel& model, const SignalAtoms& signal, double rho, double lambda,
                               double var_n)
{
    Eigen::ArrayXd w(signal.size());
    for (Eigen::Index i = 0; i < signal.size(); ++i)
        w[i] = g_inverse(model, signal.s()[i], rho, lambda, var_n);
    return w;
}

double tune_rho(const NoiseModel& model, const SignalAtoms& signal, double lambda, const PowerBudget& budget)
{
    require_positive_lambda(lambda);
    auto power = [&](double rho) {
        return (signal.weight() * optimal_weights(model, signal, rho, lambda, budget.var_n).square()).sum();
    };
    const double excess0 = power(0.0) - budget.p_w;
    if (excess0 <= 0.0)
        return 0.0;
    // |g^-1(s|rho)| <= lambda |s| / rho, hence the power at rho_hi is at most P_w.
    const double rho_hi = lambda * std::sqrt(signal.second_moment() / budget.p_w);
    const double excess_hi = power(rho_hi) - budget.p_w;
    if (excess_hi >= 0.0)
        return rho_hi;
    std::uintmax_t iters = 200;
    auto f = [&](double rho) { return power(rho) - budget.p_w; };
    const auto bracket = toms748_solve(f, 0.0, rho_hi, excess0, excess_hi, eps_tolerance<double>(52), iters);
    // Power decreases in rho: the upper end of the bracket is feasible.
    return f(bracket.first) <= 0.0 ? bracket.first : bracket.second;
}

DetectorDesign design_optimal(const NoiseModel& model, const SignalAtoms& signal, double theta,
                              const PowerBudget& budget)
{
    require_signal(signal);
    budget.validate();
    auto value = [&](double lambda) {
        const double rho = tune_rho(model, signal, lambda, budget);
        const auto w = optimal_weights(model, signal, rho, lambda, budget.var_n);
        return design_value(model, signal, w, lambda, theta, budget.var_n);
    };
    const auto best = search_lambda(value, lambda_scale(signal, budget));

    DetectorDesign out;
    out.lambda_design = best.x;
    out.rho_star = tune_rho(model, signal, best.x, budget);
    out.joint = JointAtoms::from_signal(signal, optimal_weights(model, signal, out.rho_star, best.x, budget.var_n));
    out.theta = theta;
    out.e_fa = fa_exponent(theta, budget);
    out.e_md = md_exponent(out.joint, theta, budget, model);
    return out;
}

JointAtoms design_classical(const SignalAtoms& signal, const PowerBudget& budget)
{
    require_signal(signal);
    const double scale = std::sqrt(budget.p_w / signal.second_moment());
    return JointAtoms::from_signal(signal, scale * signal.s());
}

JointAtoms design_binary(const SignalAtoms& signal, const PowerBudget& budget)
{
    const double level = std::sqrt(budget.p_w);
    return JointAtoms::from_signal(signal, (signal.s() >= 0.0).select(level, Eigen::ArrayXd::Constant(signal.size(), -level)));
}

namespace {

struct SortedSignal {
    std::vector<double> s;
    std::vector<double> p;
};

SortedSignal sorted_signal(const SignalAtoms& signal)
{
    std::vector<Eigen::Index> order(static_cast<std::size_t>(signal.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return signal.s()[a] < signal.s()[b]; });
    SortedSignal out;
    for (auto i : order) {
        if (signal.weight()[i] == 0.0)
            continue;
        out.s.push_back(signal.s()[i]);
        out.p.push_back(signal.weight()[i]);
    }
    return out;
}

std::size_t cell_of(const std::vector<double>& boundaries, double s)
{
    return static_cast<std::size_t>(std::upper_bound(boundaries.begin(), boundaries.end(), s) - boundaries.begin());
}

std::vector<double> quantile_boundaries(const SortedSignal& sig, int k)
{
    std::vector<double> out;
    double cum = 0.0;
    std::size_t j = 0;
    for (int i = 1; i < k; ++i) {
        const double target = static_cast<double>(i) / k - 1e-12;
        while (j < sig.s.size() && cum + sig.p[j] < target) {
            cum += sig.p[j];
            ++j;
        }
        // The atom j completes the mass i/k; cut between it and the next distinct value.
        std::size_t next = j + 1;
        while (next < sig.s.size() && sig.s[next] == sig.s[j])
            ++next;
        if (next >= sig.s.size())
            next = sig.s.size() - 1;
        out.push_back(0.5 * (sig.s[j] + sig.s[next]));
    }
    return out;
}

struct Cells {
    std::vector<double> prob;
    std::vector<double> centroid;
    std::vector<double> lo;  // smallest atom in cell
    std::vector<double> hi;  // largest atom in cell
};

Cells partition(const SortedSignal& sig, const std::vector<double>& boundaries)
{
    const std::size_t k = boundaries.size() + 1;
    Cells c{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0),
            std::vector<double>(k, std::numeric_limits<double>::infinity()),
            std::vector<double>(k, -std::numeric_limits<double>::infinity())};
    for (std::size_t j = 0; j < sig.s.size(); ++j) {
        const auto i = cell_of(boundaries, sig.s[j]);
        c.prob[i] += sig.p[j];
        c.centroid[i] += sig.p[j] * sig.s[j];
        c.lo[i] = std::min(c.lo[i], sig.s[j]);
        c.hi[i] = std::max(c.hi[i], sig.s[j]);
    }
    for (std::size_t i = 0; i < k; ++i)
        if (c.prob[i] > 0.0)
            c.centroid[i] /= c.prob[i];
    return c;
}

// Drops boundaries of empty cells and re-splits the widest occupied cell
// until every cell holds mass.
Cells repair_empty_cells(const SortedSignal& sig, std::vector<double>& boundaries)
{
    for (int guard = 0; guard < 1000; ++guard) {
        Cells c = partition(sig, boundaries);
        const auto empty = std::find(c.prob.begin(), c.prob.end(), 0.0);
        if (empty == c.prob.end())
            return c;
        const auto e = static_cast<std::size_t>(empty - c.prob.begin());
        boundaries.erase(boundaries.begin() + static_cast<std::ptrdiff_t>(e == 0 ? 0 : e - 1));
        c = partition(sig, boundaries);
        std::size_t widest = 0;
        double width = -1.0;
        for (std::size_t i = 0; i < c.prob.size(); ++i)
            if (c.prob[i] > 0.0 && c.hi[i] - c.lo[i] > width) {
                width = c.hi[i] - c.lo[i];
                widest = i;
            }
        if (width <= 0.0)
            return c;  // fewer distinct values than cells
        boundaries.push_back(0.5 * (c.lo[widest] + c.hi[widest]));
        std::sort(boundaries.begin(), boundaries.end());
    }
    throw std::runtime_error("quantizer: could not repair empty cells");
}

struct LloydState {
    std::vector<double> boundaries;
    std::vector<double> levels;
    Cells cells;
    double rho = 0.0;
    int sweeps = 0;
    bool converged = false;
    double value = 0.0;
};

LloydState run_lloyd(const NoiseModel& model, const SortedSignal& sig, std::vector<double> boundaries,
                     double lambda, double theta, const PowerBudget& budget)
{
    LloydState st;
    std::vector<double> levels;
    for (int sweep = 1; sweep <= 500; ++sweep) {
        st.sweeps = sweep;
        Cells cells = repair_empty_cells(sig, boundaries);
        std::vector<double> m, p;
        for (std::size_t i = 0; i < cells.prob.size(); ++i) {
            m.push_back(cells.centroid[i]);
            p.push_back(cells.prob[i]);
        }
        const SignalAtoms cell_signal(Eigen::Map<Eigen::ArrayXd>(m.data(), static_cast<Eigen::Index>(m.size())),
                                      Eigen::Map<Eigen::ArrayXd>(p.data(), static_cast<Eigen::Index>(p.size())));
        const double rho = tune_rho(model, cell_signal, lambda, budget);
        const Eigen::ArrayXd w = optimal_weights(model, cell_signal, rho, lambda, budget.var_n);
        std::vector<double> new_levels(w.data(), w.data() + w.size());

        std::vector<double> new_boundaries = boundaries;
        for (std::size_t i = 1; i < new_levels.size(); ++i) {
            const double w0 = new_levels[i - 1], w1 = new_levels[i];
            if (w1 == w0)
                continue;
            new_boundaries[i - 1] =
                (cgf_eval(model, lambda * w1) - cgf_eval(model, lambda * w0) +
                 0.5 * (rho + lambda * lambda * budget.var_n) * (w1 * w1 - w0 * w0)) /
                (lambda * (w1 - w0));
        }
        std::sort(new_boundaries.begin(), new_boundaries.end());

        double change = 0.0;
        if (levels.size() == new_levels.size())
            for (std::size_t i = 0; i < levels.size(); ++i)
                change = std::max(change, std::abs(levels[i] - new_levels[i]));
        else
            change = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < boundaries.size(); ++i)
            change = std::max(change, std::abs(boundaries[i] - new_boundaries[i]));

        st.rho = rho;
        st.cells = std::move(cells);
        st.levels = new_levels;
        st.value = design_value(model, cell_signal, w, lambda, theta, budget.var_n);
        levels = std::move(new_levels);
        boundaries = std::move(new_boundaries);
        st.boundaries = boundaries;
        if (change < 1e-9) {
            st.converged = true;
            break;
        }
    }
    // Cells must reflect the final boundaries.
    st.cells = repair_empty_cells(sig, st.boundaries);
    return st;
}

}  // namespace

QuantizerDesign design_quantized(const NoiseModel& model, const SignalAtoms& signal, int k, double theta,
                                 const PowerBudget& budget, const std::optional<std::vector<double>>& initial_boundaries)
{
    if (k < 2)
        throw std::invalid_argument("design_quantized: k must be >= 2");
    require_signal(signal);
    budget.validate();
    const auto sig = sorted_signal(signal);
    std::size_t distinct = 1;
    for (std::size_t j = 1; j < sig.s.size(); ++j)
        if (sig.s[j] != sig.s[j - 1])
            ++distinct;
    k = std::min<int>(k, static_cast<int>(distinct));

    std::vector<double> init;
    if (initial_boundaries) {
        init = *initial_boundaries;
        std::sort(init.begin(), init.end());
        if (init.size() + 1 != static_cast<std::size_t>(k))
            throw std::invalid_argument("design_quantized: initial boundaries must number k - 1");
    } else {
        init = quantile_boundaries(sig, k);
    }

    auto value = [&](double lambda) { return run_lloyd(model, sig, init, lambda, theta, budget).value; };
    const auto best = search_lambda(value, lambda_scale(signal, budget));
    const auto st = run_lloyd(model, sig, init, best.x, theta, budget);

    QuantizerDesign out;
    out.boundaries = st.boundaries;
    out.levels = st.levels;
    out.cell_probability = st.cells.prob;
    out.centroids = st.cells.centroid;
    out.rho = st.rho;
    out.lambda = best.x;
    out.sweeps = st.sweeps;
    out.converged = st.converged;
    Eigen::ArrayXd w(signal.size());
    for (Eigen::Index i = 0; i < signal.size(); ++i)
        w[i] = out.levels[cell_of(out.boundaries, signal.s()[i])];
    out.joint = JointAtoms::from_signal(signal, w);
    out.e_md = md_exponent(out.joint, theta, budget, model);
    return out;
}

ExponentResult four_ask_exponent(const NoiseModel& model, double a, double alpha, double theta,
                                 const PowerBudget& budget)
{
    if (!(a > 0.0))
        throw std::invalid_argument("4-ASK amplitude must be > 0");
    const double beta = std::sqrt(std::max(0.0, 2.0 * budget.p_w - alpha * alpha));
    Eigen::ArrayXd w(2), s(2), p(2);
    w << alpha, beta;
    s << a, 3.0 * a;
    p << 0.5, 0.5;
    return md_exponent(JointAtoms(w, s, p), theta, budget, model);
}

FourAskDesign design_4ask(const NoiseModel& model, double a, double theta, const PowerBudget& budget)
{
    budget.validate();
    const double alpha_max = std::sqrt(2.0 * budget.p_w);
    auto value = [&](double alpha) { return four_ask_exponent(model, a, alpha, theta, budget).value; };
    auto grid = linspace(0.0, alpha_max, 2001);
    // The classical weights (w proportional to s) are always a candidate.
    const double classical = std::sqrt(budget.p_w / 5.0);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = value(grid[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    double best_alpha = grid[best];
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const auto refined = golden_section_max(value, lo, hi, 1e-10, 100);
    if (refined.value > best_value) {
        best_value = refined.value;
        best_alpha = refined.x;
    }
    if (value(classical) > best_value)
        best_alpha = classical;

    FourAskDesign out;
    out.alpha = best_alpha;
    out.beta = std::sqrt(std::max(0.0, 2.0 * budget.p_w - best_alpha * best_alpha));
    out.e_md = four_ask_exponent(model, a, best_alpha, theta, budget);
    return out;
}

}  // namespace corrdet
