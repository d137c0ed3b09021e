#include "corrdet/atoms.hpp"

#include <cmath>
#include <stdexcept>

namespace corrdet {

namespace {

Eigen::ArrayXd normalized(Eigen::ArrayXd weight)
{
    if (weight.size() == 0)
        throw std::invalid_argument("atom list is empty");
    if ((weight < 0.0).any() || !weight.allFinite())
        throw std::invalid_argument("atom weights must be finite and non-negative");
    const double total = weight.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("atom weights must have a positive sum");
    return weight / total;
}

}  // namespace

void PowerBudget::validate() const
{
    if (!(p_w > 0.0) || !std::isfinite(p_w))
        throw std::invalid_argument("p_w must be finite and > 0");
    if (!(var_n > 0.0) || !std::isfinite(var_n))
        throw std::invalid_argument("var_n must be finite and > 0");
    if (p_s && (!(*p_s > 0.0) || !std::isfinite(*p_s)))
        throw std::invalid_argument("p_s must be finite and > 0");
}

double PowerBudget::signal_power() const
{
    if (!p_s)
        throw std::invalid_argument("budget has no signal power p_s");
    return *p_s;
}

SignalAtoms::SignalAtoms(Eigen::ArrayXd s, Eigen::ArrayXd weight)
    : s_(std::move(s)), weight_(normalized(std::move(weight)))
{
    if (s_.size() != weight_.size())
        throw std::invalid_argument("signal atoms: s and weight differ in length");
    if (!s_.allFinite())
        throw std::invalid_argument("signal atoms must be finite");
}

SignalAtoms SignalAtoms::uniform(const Eigen::ArrayXd& s)
{
    return {s, Eigen::ArrayXd::Ones(s.size())};
}

JointAtoms::JointAtoms(Eigen::ArrayXd w, Eigen::ArrayXd s, Eigen::ArrayXd weight)
    : w_(std::move(w)), s_(std::move(s)), weight_(normalized(std::move(weight)))
{
    if (w_.size() != weight_.size() || s_.size() != weight_.size())
        throw std::invalid_argument("joint atoms: column lengths differ");
    if (!w_.allFinite() || !s_.allFinite())
        throw std::invalid_argument("joint atoms must be finite");
}

JointAtoms JointAtoms::from_signal(const SignalAtoms& signal, Eigen::ArrayXd w)
{
    return {std::move(w), signal.s(), signal.weight()};
}

double JointAtoms::max_abs_w() const
{
    return (weight_ > 0.0).select(w_.abs(), 0.0).maxCoeff();
}

}  // namespace corrdet
