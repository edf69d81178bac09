#include "kandistill/distill.hpp"

#include <algorithm>
#include <cmath>

#include "kandistill/errors.hpp"

namespace kandistill {

namespace {

constexpr double kProbFloor = 1e-12;

// log(a / b) with both sides floored so saturated softmaxes cannot produce
// infinities.
double log_ratio(double a, double b) {
    return std::log(std::max(a, kProbFloor) / std::max(b, kProbFloor));
}

void check_target(std::size_t n, int target) {
    if (n < 2) throw InvalidArgument("distillation needs at least two classes");
    if (target < 0 || static_cast<std::size_t>(target) >= n) {
        throw InvalidArgument("target class index out of range");
    }
}

void check_pair(std::size_t nt, std::size_t ns) {
    if (nt != ns) throw DimensionError("teacher and student logit lengths differ");
}

} // namespace

void DkdConfig::validate() const {
    if (!(alpha >= 0.0)) throw InvalidArgument("dkd alpha must be >= 0");
    if (!(beta >= 0.0)) throw InvalidArgument("dkd beta must be >= 0");
    if (!(lambda_mix >= 0.0 && lambda_mix <= 1.0)) throw InvalidArgument("dkd lambda must lie in [0, 1]");
    if (warmup_epochs < 1) throw InvalidArgument("dkd warmup_epochs must be positive");
    if (!(temperature > 0.0)) throw InvalidArgument("dkd temperature must be positive");
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
    if (!(temperature > 0.0)) throw InvalidArgument("softmax temperature must be positive");
    if (logits.empty()) throw InvalidArgument("softmax of empty logits");
    std::vector<double> p(logits.size());
    double hi = logits[0];
    for (double l : logits) hi = std::max(hi, l);
    hi /= temperature;
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] / temperature - hi);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

ProbSplit split_probs(std::span<const double> logits, int target, double temperature) {
    check_target(logits.size(), target);
    const auto p = softmax(logits, temperature);
    ProbSplit split;
    split.p_target = p[static_cast<std::size_t>(target)];
    split.p_nontarget = 1.0 - split.p_target;

    // Softmax over the non-target logits alone; equals p_i / p_nontarget.
    std::vector<double> rest;
    rest.reserve(logits.size() - 1);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (static_cast<int>(i) != target) rest.push_back(logits[i]);
    }
    split.tilde_p = softmax(rest, temperature);
    return split;
}

double kd_coupled(std::span<const double> teacher_logits, std::span<const double> student_logits,
                  int target, double temperature) {
    check_pair(teacher_logits.size(), student_logits.size());
    check_target(teacher_logits.size(), target);
    const auto pt = softmax(teacher_logits, temperature);
    const auto ps = softmax(student_logits, temperature);
    double kl = 0.0;
    for (std::size_t i = 0; i < pt.size(); ++i) {
        kl += pt[i] * log_ratio(pt[i], ps[i]);
    }
    return temperature * temperature * kl;
}

double tckd(std::span<const double> teacher_logits, std::span<const double> student_logits,
            int target, double temperature) {
    check_pair(teacher_logits.size(), student_logits.size());
    const auto t = split_probs(teacher_logits, target, temperature);
    const auto s = split_probs(student_logits, target, temperature);
    const double kl = t.p_target * log_ratio(t.p_target, s.p_target) +
                      t.p_nontarget * log_ratio(t.p_nontarget, s.p_nontarget);
    return temperature * temperature * kl;
}

double nckd(std::span<const double> teacher_logits, std::span<const double> student_logits,
            int target, double temperature) {
    check_pair(teacher_logits.size(), student_logits.size());
    check_target(teacher_logits.size(), target);
    if (teacher_logits.size() == 2) return 0.0; // single non-target class
    const auto t = split_probs(teacher_logits, target, temperature);
    const auto s = split_probs(student_logits, target, temperature);
    double kl = 0.0;
    for (std::size_t i = 0; i < t.tilde_p.size(); ++i) {
        kl += t.tilde_p[i] * log_ratio(t.tilde_p[i], s.tilde_p[i]);
    }
    return temperature * temperature * kl;
}

double dkd_loss(std::span<const double> teacher_logits, std::span<const double> student_logits,
                int target, const DkdConfig& cfg) {
    cfg.validate();
    return cfg.alpha * tckd(teacher_logits, student_logits, target, cfg.temperature) +
           cfg.beta * nckd(teacher_logits, student_logits, target, cfg.temperature);
}

double warmup_factor(int epoch, int warmup_epochs) {
    if (epoch < 0) throw InvalidArgument("epoch must be >= 0");
    if (warmup_epochs < 1) throw InvalidArgument("warmup_epochs must be positive");
    return std::min(static_cast<double>(epoch) / static_cast<double>(warmup_epochs), 1.0);
}

double total_loss(double hard_ce, double dkd, int epoch, const DkdConfig& cfg) {
    cfg.validate();
    return (1.0 - cfg.lambda_mix) * hard_ce +
           cfg.lambda_mix * warmup_factor(epoch, cfg.warmup_epochs) * dkd;
}

std::vector<double> dkd_loss_grad(std::span<const double> teacher_logits,
                                  std::span<const double> student_logits, int target,
                                  const DkdConfig& cfg) {
    cfg.validate();
    check_pair(teacher_logits.size(), student_logits.size());
    check_target(teacher_logits.size(), target);

    const double tmp = cfg.temperature;
    const std::size_t n = student_logits.size();
    const auto ti = static_cast<std::size_t>(target);
    std::vector<double> grad(n, 0.0);

    const auto t = split_probs(teacher_logits, target, tmp);
    const auto q = softmax(student_logits, tmp);
    const double q_t = q[ti];
    const double q_nt = std::max(1.0 - q_t, kProbFloor);

    // TCKD: d/ds_j = -T * (delta_tj - q_j) * (p_t^T - p_-t^T * q_t / (1 - q_t)).
    const double coef = t.p_target - t.p_nontarget * q_t / q_nt;
    for (std::size_t j = 0; j < n; ++j) {
        const double delta = (j == ti) ? 1.0 : 0.0;
        grad[j] += cfg.alpha * (-tmp) * (delta - q[j]) * coef;
    }

    // NCKD: d/ds_j = T * (tilde_q_j - tilde_p_j^T) on non-target logits.
    if (n > 2 && cfg.beta != 0.0) {
        std::vector<double> rest;
        rest.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != ti) rest.push_back(student_logits[i]);
        }
        const auto tilde_q = softmax(rest, tmp);
        std::size_t r = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == ti) continue;
            grad[j] += cfg.beta * tmp * (tilde_q[r] - t.tilde_p[r]);
            ++r;
        }
    }
    return grad;
}

double cross_entropy(std::span<const double> logits, int target) {
    check_target(logits.size(), target);
    double hi = logits[0];
    for (double l : logits) hi = std::max(hi, l);
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - hi);
    const double lse = hi + std::log(sum);
    return lse - logits[static_cast<std::size_t>(target)];
}

std::vector<double> cross_entropy_grad(std::span<const double> logits, int target) {
    check_target(logits.size(), target);
    auto grad = softmax(logits, 1.0);
    grad[static_cast<std::size_t>(target)] -= 1.0;
    return grad;
}

std::vector<double> total_loss_grad(std::span<const double> teacher_logits,
                                    std::span<const double> student_logits, int target,
                                    int epoch, const DkdConfig& cfg) {
    cfg.validate();
    auto grad = cross_entropy_grad(student_logits, target);
    const double hard_w = 1.0 - cfg.lambda_mix;
    for (auto& g : grad) g *= hard_w;
    const double dkd_w = cfg.lambda_mix * warmup_factor(epoch, cfg.warmup_epochs);
    if (dkd_w != 0.0) {
        const auto dg = dkd_loss_grad(teacher_logits, student_logits, target, cfg);
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += dkd_w * dg[i];
    }
    return grad;
}

} // namespace kandistill
