#include "povm/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "povm/errors.hpp"
#include "povm/tolerances.hpp"

namespace povm {

namespace {

void check_hermitian_psd(const ComplexMatrix& op, const char* what) {
    checked_dim(op);
    const double defect = hermiticity_defect(op);
    if (defect > tolerances().herm) {
        throw InvariantError(std::string(what) + " is not Hermitian (defect " +
                             std::to_string(defect) + ")");
    }
    const double lowest = spectral_decompose(op).values(0);
    if (lowest < -tolerances().psd) {
        throw InvariantError(std::string(what) + " is not PSD (min eigenvalue " +
                             std::to_string(lowest) + ")");
    }
}

} // namespace

DensityMatrix::DensityMatrix(ComplexMatrix op) : op_(std::move(op)) {
    check_hermitian_psd(op_, "density matrix");
    const double tr = op_.trace().real();
    if (std::abs(tr - 1.0) > tolerances().trace) {
        throw InvariantError("density matrix trace is " + std::to_string(tr));
    }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) { return DensityMatrix(projector(psi)); }

DensityMatrix DensityMatrix::basis(std::size_t dim, std::size_t i) {
    if (i >= dim) throw UsageError("basis index out of range");
    return DensityMatrix(basis_projector(dim, i));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

Effect::Effect(ComplexMatrix op) : op_(std::move(op)) { check_hermitian_psd(op_, "effect"); }

Povm::Povm(std::vector<Effect> effects)
    : effects_(std::move(effects)), kraus_(std::make_shared<KrausCache>()) {
    if (effects_.empty()) throw InvariantError("POVM needs at least one effect");
    const auto n = static_cast<Eigen::Index>(effects_.front().dim());
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& e : effects_) {
        if (e.op().rows() != n) throw DimensionError("POVM effects have different dimensions");
        sum += e.op();
    }
    const double defect = max_abs_entry(sum - ComplexMatrix::Identity(n, n));
    if (defect > tolerances().sum) {
        throw InvariantError("POVM effects do not sum to identity (defect " +
                             std::to_string(defect) + ")");
    }
}

namespace {
std::vector<Effect> to_effects(const std::vector<ComplexMatrix>& ops) {
    std::vector<Effect> out;
    out.reserve(ops.size());
    for (const auto& op : ops) out.emplace_back(op);
    return out;
}
} // namespace

Povm::Povm(const std::vector<ComplexMatrix>& effects) : Povm(to_effects(effects)) {}

Povm Povm::binary(const ComplexMatrix& pi0) {
    const auto n = pi0.rows();
    return Povm(std::vector<ComplexMatrix>{pi0, ComplexMatrix::Identity(n, n) - pi0});
}

Povm Povm::computational_basis(std::size_t dim) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < dim; ++i) ops.push_back(basis_projector(dim, i));
    return Povm(ops);
}

Povm Povm::projective(const ComplexMatrix& basis_columns) {
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index i = 0; i < basis_columns.cols(); ++i) {
        ops.push_back(basis_columns.col(i) * basis_columns.col(i).adjoint());
    }
    return Povm(ops);
}

const ComplexMatrix& Povm::kraus(std::size_t j) const {
    std::call_once(kraus_->once, [this] {
        kraus_->ops.reserve(effects_.size());
        for (const auto& e : effects_) kraus_->ops.push_back(psd_sqrt(e.op()));
    });
    return kraus_->ops.at(j);
}

std::vector<double> born_distribution(const Povm& povm, const DensityMatrix& state) {
    if (povm.dim() != state.dim()) {
        throw DimensionError("born_distribution: POVM dim " + std::to_string(povm.dim()) +
                             " vs state dim " + std::to_string(state.dim()));
    }
    const double tol = tolerances().prob;
    std::vector<double> p(povm.outcomes());
    double total = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double v = real_trace_product(state.op(), povm.effect(j));
        if (v < -tol || v > 1.0 + tol) {
            throw InvariantError("born probability out of range: " + std::to_string(v));
        }
        p[j] = std::clamp(v, 0.0, 1.0);
        total += v;
    }
    if (std::abs(total - 1.0) > tol * static_cast<double>(p.size())) {
        throw InvariantError("born probabilities sum to " + std::to_string(total));
    }
    return p;
}

double outcome_one_probability(const Povm& povm, const DensityMatrix& state) {
    if (povm.outcomes() != 2) throw UsageError("expected a two-outcome POVM");
    return born_distribution(povm, state)[1];
}

DensityMatrix post_measurement_state(const Povm& povm, const DensityMatrix& state,
                                     std::size_t outcome) {
    const auto p = born_distribution(povm, state);
    if (outcome >= p.size()) throw UsageError("outcome index out of range");
    if (p[outcome] <= 0.0) throw UsageError("outcome has probability zero");
    const ComplexMatrix& m = povm.kraus(outcome);
    ComplexMatrix next = m * state.op() * m.adjoint() / p[outcome];
    // Trace is exactly 1 up to round-off; renormalize and symmetrize before re-validation.
    next = 0.5 * (next + next.adjoint());
    next /= next.trace().real();
    return DensityMatrix(std::move(next));
}

std::size_t sample_outcome(const std::vector<double>& probs, Rng& rng) {
    double total = 0.0;
    for (double v : probs) total += v;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last = probs.size();
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (probs[j] <= 0.0) continue;
        acc += probs[j];
        last = j;
        if (u < acc) return j;
    }
    if (last == probs.size()) throw UsageError("sample_outcome: no outcome has positive mass");
    return last;
}

QuantumRegister::QuantumRegister(DensityMatrix state, Policy policy)
    : state_(std::move(state)), policy_(policy) {}

std::size_t QuantumRegister::measure(const Povm& povm, Rng& rng) {
    if (destroyed_) throw RegisterError("register was destroyed");
    if (policy_ == Policy::SingleShot && measurements_ > 0) {
        throw RegisterError("single-shot register measured twice");
    }
    const auto p = born_distribution(povm, state_);
    const std::size_t j = sample_outcome(p, rng);
    state_ = post_measurement_state(povm, state_, j);
    ++measurements_;
    return j;
}

} // namespace povm
