#pragma once

#include <span>
#include <vector>

namespace kandistill {

// Weights of the decoupled distillation objective and of the mixed total
// loss (1 - lambda) * hard + lambda * min(epoch / warmup, 1) * dkd.
struct DkdConfig {
    double alpha = 5.0;       // target-class term weight
    double beta = 1.0;        // non-target term weight
    double lambda_mix = 0.1;  // share of the distillation term in the total
    int warmup_epochs = 5;
    double temperature = 4.0;

    void validate() const;
};

// Target/non-target view of one tempered softmax: b = (p_target,
// p_nontarget) plus the renormalized non-target distribution.
struct ProbSplit {
    double p_target = 0.0;
    double p_nontarget = 0.0;
    std::vector<double> tilde_p; // length C - 1, sums to 1
};

// Tempered softmax of logits / temperature, max-subtracted for stability.
std::vector<double> softmax(std::span<const double> logits, double temperature);

ProbSplit split_probs(std::span<const double> logits, int target, double temperature);

// Coupled KL distillation loss KL(p_teacher || p_student) over full tempered
// softmaxes, scaled by temperature^2.
double kd_coupled(std::span<const double> teacher_logits, std::span<const double> student_logits,
                  int target, double temperature);

// Binary KL between the (p_target, p_nontarget) pairs, temperature^2 scaled.
double tckd(std::span<const double> teacher_logits, std::span<const double> student_logits,
            int target, double temperature);

// KL between the non-target renormalized distributions, temperature^2
// scaled. Exactly 0 for two-class logits.
double nckd(std::span<const double> teacher_logits, std::span<const double> student_logits,
            int target, double temperature);

// alpha * TCKD + beta * NCKD.
double dkd_loss(std::span<const double> teacher_logits, std::span<const double> student_logits,
                int target, const DkdConfig& cfg);

// Linear warm-up factor min(epoch / warmup_epochs, 1).
double warmup_factor(int epoch, int warmup_epochs);

// (1 - lambda) * hard_ce + lambda * warmup * dkd.
double total_loss(double hard_ce, double dkd, int epoch, const DkdConfig& cfg);

// d(dkd_loss)/d(student logits).
std::vector<double> dkd_loss_grad(std::span<const double> teacher_logits,
                                  std::span<const double> student_logits, int target,
                                  const DkdConfig& cfg);

// Cross-entropy on untempered logits with an integer label, and its
// gradient softmax(logits) - onehot(target).
double cross_entropy(std::span<const double> logits, int target);
std::vector<double> cross_entropy_grad(std::span<const double> logits, int target);

// Gradient of the mixed total loss w.r.t. student logits.
std::vector<double> total_loss_grad(std::span<const double> teacher_logits,
                                    std::span<const double> student_logits, int target,
                                    int epoch, const DkdConfig& cfg);

} // namespace kandistill
