#pragma once

#include <Eigen/Dense>

#include <optional>

namespace corrdet {

/// Power constraints {P_w, P_s, sigma_N^2}. P_s is only needed by the joint
/// signal/correlator design.
struct PowerBudget {
    double p_w = 1.0;
    std::optional<double> p_s;
    double var_n = 1.0;

    void validate() const;
    double signal_power() const;  // throws if p_s is unset
};

/// Finite empirical distribution of the signal level S.
class SignalAtoms {
public:
    SignalAtoms() = default;
    /// Weights are normalized to sum to one; they must be >= 0 with a positive sum.
    SignalAtoms(Eigen::ArrayXd s, Eigen::ArrayXd weight);

    /// Equiprobable atoms.
    static SignalAtoms uniform(const Eigen::ArrayXd& s);

    const Eigen::ArrayXd& s() const { return s_; }
    const Eigen::ArrayXd& weight() const { return weight_; }
    Eigen::Index size() const { return s_.size(); }

    double second_moment() const { return (weight_ * s_.square()).sum(); }
    double mean_abs() const { return (weight_ * s_.abs()).sum(); }

private:
    Eigen::ArrayXd s_;
    Eigen::ArrayXd weight_;
};

/// Finite joint distribution of (correlator weight W, signal level S).
class JointAtoms {
public:
    JointAtoms() = default;
    JointAtoms(Eigen::ArrayXd w, Eigen::ArrayXd s, Eigen::ArrayXd weight);

    /// Pairs each signal atom with the given weight values.
    static JointAtoms from_signal(const SignalAtoms& signal, Eigen::ArrayXd w);

    const Eigen::ArrayXd& w() const { return w_; }
    const Eigen::ArrayXd& s() const { return s_; }
    const Eigen::ArrayXd& weight() const { return weight_; }
    Eigen::Index size() const { return w_.size(); }

    double correlation() const { return (weight_ * w_ * s_).sum(); }
    double w_power() const { return (weight_ * w_.square()).sum(); }
    double s_power() const { return (weight_ * s_.square()).sum(); }
    /// max |w| over atoms with positive weight.
    double max_abs_w() const;

    SignalAtoms signal() const { return {s_, weight_}; }

private:
    Eigen::ArrayXd w_;
    Eigen::ArrayXd s_;
    Eigen::ArrayXd weight_;
};

}  // namespace corrdet
