#include "corrdet/io.hpp"

#include "corrdet/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace corrdet {

namespace {

double number(const Json& j, const std::string& key)
{
    const auto& v = require(j, key);
    if (!v.is_number())
        throw ConfigError("field '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback)
{
    return j.contains(key) ? number(j, key) : fallback;
}

Eigen::ArrayXd array(const Json& j, const std::string& key)
{
    const auto& v = require(j, key);
    if (!v.is_array() || v.empty())
        throw ConfigError("field '" + key + "' must be a non-empty array of numbers");
    Eigen::ArrayXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ConfigError("field '" + key + "' must contain only numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

Json array_json(const Eigen::ArrayXd& a)
{
    Json out = Json::array();
    for (double x : a)
        out.push_back(x);
    return out;
}

template <class F>
auto rethrow_as_config(F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

const Json& require(const Json& j, const std::string& key)
{
    if (!j.is_object() || !j.contains(key))
        throw ConfigError("missing field '" + key + "'");
    return j.at(key);
}

NoiseModel model_from_json(const Json& j)
{
    const auto& type = require(j, "type");
    if (!type.is_string())
        throw ConfigError("model 'type' must be a string");
    const auto name = type.get<std::string>();
    NoiseModel m;
    if (name == "gaussian")
        m = Gaussian{number(j, "var_z")};
    else if (name == "laplacian")
        m = Laplacian{number(j, "q")};
    else if (name == "binary")
        m = BinarySymmetric{number(j, "z0")};
    else if (name == "uniform")
        m = Uniform{number(j, "z0")};
    else if (name == "mixture_binary_laplace")
        m = MixtureBinaryLaplace{number(j, "delta"), number(j, "z0"), number(j, "q")};
    else
        throw ConfigError("unknown model type '" + name + "'");
    rethrow_as_config([&] {
        validate(m);
        return 0;
    });
    return m;
}

Json to_json(const NoiseModel& model)
{
    Json j;
    j["type"] = model_name(model);
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Gaussian>) {
                j["var_z"] = m.var_z;
            } else if constexpr (std::is_same_v<M, Laplacian>) {
                j["q"] = m.q;
            } else if constexpr (std::is_same_v<M, MixtureBinaryLaplace>) {
                j["delta"] = m.delta;
                j["z0"] = m.z0;
                j["q"] = m.q;
            } else {
                j["z0"] = m.z0;
            }
        },
        model);
    return j;
}

PowerBudget budget_from_json(const Json& j)
{
    PowerBudget b;
    if (!j.is_null()) {
        if (!j.is_object())
            throw ConfigError("budget must be an object");
        b.p_w = number_or(j, "p_w", b.p_w);
        b.var_n = number_or(j, "var_n", b.var_n);
        if (j.contains("p_s"))
            b.p_s = number(j, "p_s");
    }
    return rethrow_as_config([&] {
        b.validate();
        return b;
    });
}

SignalAtoms signal_from_json(const Json& j)
{
    const auto s = array(j, "s");
    const Eigen::ArrayXd w = j.contains("weight") ? array(j, "weight") : Eigen::ArrayXd::Ones(s.size());
    if (w.size() != s.size())
        throw ConfigError("signal 's' and 'weight' differ in length");
    return rethrow_as_config([&] { return SignalAtoms(s, w); });
}

JointAtoms joint_from_json(const Json& j)
{
    const auto w = array(j, "w");
    const auto s = array(j, "s");
    const Eigen::ArrayXd p = j.contains("weight") ? array(j, "weight") : Eigen::ArrayXd::Ones(s.size());
    if (w.size() != s.size() || p.size() != s.size())
        throw ConfigError("joint atoms 'w', 's' and 'weight' differ in length");
    return rethrow_as_config([&] { return JointAtoms(w, s, p); });
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows)
{
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

void write_joint_csv(std::ostream& os, const JointAtoms& joint)
{
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < joint.size(); ++i)
        rows.push_back({joint.w()[i], joint.s()[i], joint.weight()[i]});
    write_csv(os, {"w", "s", "weight"}, rows);
}

Json to_json(const ExponentResult& r)
{
    return Json{{"value", r.value}, {"lambda_star", r.lambda_star}};
}

Json to_json(const JointAtoms& joint)
{
    return Json{{"w", array_json(joint.w())}, {"s", array_json(joint.s())}, {"weight", array_json(joint.weight())}};
}

Json to_json(const DetectorDesign& d)
{
    return Json{{"theta", d.theta},     {"alpha", d.alpha},       {"e_fa", d.e_fa},
                {"e_md", to_json(d.e_md)}, {"rho_star", d.rho_star}, {"lambda_design", d.lambda_design},
                {"joint", to_json(d.joint)}};
}

Json to_json(const QuantizerDesign& q)
{
    return Json{{"boundaries", q.boundaries},
                {"levels", q.levels},
                {"cell_probability", q.cell_probability},
                {"centroids", q.centroids},
                {"rho", q.rho},
                {"lambda", q.lambda},
                {"sweeps", q.sweeps},
                {"converged", q.converged},
                {"e_md", to_json(q.e_md)},
                {"joint", to_json(q.joint)}};
}

Json to_json(const JointDesignResult& r)
{
    return Json{{"e_md", r.e_md},
                {"lambda_star", r.lambda_star},
                {"p_star", r.p_star},
                {"levels", {{"a", r.a}, {"b", r.b}, {"mix_alpha", r.mix_alpha}}},
                {"signal_scale", r.signal_scale},
                {"c_tilde", r.c_tilde},
                {"curvature", to_string(r.curvature)},
                {"p_cap", r.p_cap},
                {"cap_converged", r.cap_converged}};
}

}  // namespace corrdet
