#include "povm/zoo.hpp"

#include <cmath>
#include <string>

#include "povm/errors.hpp"
#include "povm/tolerances.hpp"

namespace povm {

std::string HypothesisClass::variant_name() const {
    switch (variant_) {
    case Variant::Finite: return "finite";
    case Variant::JointlyMeasurable: return "jointly_measurable";
    case Variant::ApproxJmPartitioned: return "approx_jm_partitioned";
    case Variant::Parameterized: return "parameterized";
    }
    return "unknown";
}

namespace {
void check_members_against_domain(const std::vector<Povm>& members, const DomainSpec& domain) {
    if (members.empty()) throw InvariantError("hypothesis class is empty");
    for (const auto& m : members) {
        if (m.dim() != domain.dim()) throw DimensionError("class member dimension differs from domain");
        if (m.outcomes() != members.front().outcomes()) throw InvariantError("class members have different outcome counts");
    }
}
} // namespace

HypothesisClass HypothesisClass::finite(std::vector<Povm> members, DomainSpec domain) {
    HypothesisClass c(Variant::Finite, std::move(domain));
    check_members_against_domain(members, c.domain_);
    c.members_ = std::move(members);
    return c;
}

HypothesisClass HypothesisClass::jointly_measurable(Povm root, std::vector<ClassicalChannel> channels, DomainSpec domain) {
    HypothesisClass c(Variant::JointlyMeasurable, std::move(domain));
    c.members_.reserve(channels.size());
    for (const auto& ch : channels) c.members_.push_back(induced_povm(FineGraining{root, ch}));
    check_members_against_domain(c.members_, c.domain_);
    c.root_ = std::move(root);
    c.channels_ = std::move(channels);
    return c;
}

HypothesisClass HypothesisClass::partitioned(Partition partition, DomainSpec domain) {
    HypothesisClass c(Variant::ApproxJmPartitioned, std::move(domain));
    if (partition.elements.size() != partition.member_ids.size()) {
        throw InvariantError("partition: element and member-id lists differ in length");
    }
    std::size_t total = 0;
    for (std::size_t e = 0; e < partition.elements.size(); ++e) {
        if (partition.member_ids[e].size() != partition.elements[e].size()) {
            throw InvariantError("partition: element " + std::to_string(e) + " id list has wrong length");
        }
        total += partition.member_ids[e].size();
    }
    std::vector<std::optional<Povm>> slots(total);
    for (std::size_t e = 0; e < partition.elements.size(); ++e) {
        for (std::size_t k = 0; k < partition.member_ids[e].size(); ++k) {
            const std::size_t id = partition.member_ids[e][k];
            if (id >= total || slots[id].has_value()) {
                throw InvariantError("partition elements are not disjoint or do not cover the class");
            }
            slots[id] = partition.elements[e].members()[k].member;
        }
    }
    c.members_.reserve(total);
    for (auto& s : slots) c.members_.push_back(std::move(*s));
    check_members_against_domain(c.members_, c.domain_);
    c.partition_ = std::move(partition);
    return c;
}

HypothesisClass HypothesisClass::parameterized(std::string ansatz, std::vector<std::vector<double>> grid,
                                               const PovmGenerator& generator, DomainSpec domain) {
    HypothesisClass c(Variant::Parameterized, std::move(domain));
    c.members_.reserve(grid.size());
    for (const auto& theta : grid) c.members_.push_back(generator(theta));
    check_members_against_domain(c.members_, c.domain_);
    c.grid_ = std::move(grid);
    c.ansatz_ = std::move(ansatz);
    return c;
}

const Povm& HypothesisClass::root() const {
    if (!root_) throw UsageError("class is not jointly measurable");
    return *root_;
}

const std::vector<ClassicalChannel>& HypothesisClass::channels() const {
    if (!root_) throw UsageError("class is not jointly measurable");
    return channels_;
}

const Partition& HypothesisClass::partition() const {
    if (!partition_) throw UsageError("class carries no approximately jointly measurable partition");
    return *partition_;
}

const std::vector<std::vector<double>>& HypothesisClass::grid() const {
    if (variant_ != Variant::Parameterized) throw UsageError("class is not parameterized");
    return grid_;
}

std::optional<FineGraining> HypothesisClass::fine_graining(std::size_t i) const {
    if (root_) return FineGraining{*root_, channels_.at(i)};
    if (partition_) {
        for (std::size_t e = 0; e < partition_->member_ids.size(); ++e) {
            const auto& ids = partition_->member_ids[e];
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (ids[k] == i) {
                    const auto& m = partition_->elements[e].members()[k];
                    return FineGraining{m.root, m.channel};
                }
            }
        }
    }
    return std::nullopt;
}

HypothesisClass partition_jointly_measurable(const HypothesisClass& jm,
                                             const std::vector<std::vector<std::size_t>>& groups) {
    std::size_t listed = 0;
    for (const auto& g : groups) listed += g.size();
    if (listed != jm.size()) throw InvariantError("partition groups do not cover the class exactly once");
    Partition p;
    for (const auto& g : groups) {
        std::vector<ClassicalChannel> chans;
        chans.reserve(g.size());
        for (std::size_t id : g) chans.push_back(jm.channels().at(id));
        p.elements.push_back(ApproxJmElement::exact(jm.root(), chans, jm.domain()));
        p.member_ids.push_back(g);
    }
    return HypothesisClass::partitioned(std::move(p), jm.domain());
}

HypothesisClass singleton_partition(const std::vector<Povm>& members, const DomainSpec& domain) {
    Partition p;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto k = members[i].outcomes();
        p.elements.push_back(ApproxJmElement(
            members[i], {JmMember{members[i], members[i], ClassicalChannel::identity(k)}}, 0.0, domain));
        p.member_ids.push_back({i});
    }
    return HypothesisClass::partitioned(std::move(p), domain);
}

void PoccClass::validate() const {
    if (domain_size == 0) throw InvariantError("POCC domain is empty");
    if (p1.empty()) throw InvariantError("POCC class is empty");
    for (const auto& h : p1) {
        if (h.size() != domain_size) throw InvariantError("POCC member has wrong domain size");
        for (double v : h) {
            if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("POCC parameter outside [0,1]");
        }
    }
}

std::vector<double> thm1_z_grid(std::size_t count, double alpha) {
    if (count == 0) throw UsageError("z grid needs at least one point");
    if (count == 1) return {0.0};
    std::vector<double> z(count);
    for (std::size_t i = 0; i < count; ++i) {
        z[i] = -alpha + 2.0 * alpha * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return z;
}

Thm1Classes make_thm1_classes(const std::vector<double>& z_grid, double alpha) {
    if (!(alpha >= 0.0) || alpha >= 0.1) throw UsageError("alpha must lie in [0, 0.1)");
    if (z_grid.empty()) throw UsageError("z grid is empty");
    Thm1Classes out;
    out.hat.domain_size = 4;
    for (double z : z_grid) {
        if (std::abs(z) > alpha + 1e-15) throw UsageError("z outside [-alpha, alpha]");
        const double c = 0.1 + z;
        out.crossovers.push_back(c);
        std::vector<double> p(4);
        for (std::size_t x = 0; x < 4; ++x) p[x] = thm1_x1(x) == 1 ? 1.0 - c : c;
        out.hat.p1.push_back(std::move(p));
    }
    out.full = out.hat;
    std::vector<double> star(4);
    for (std::size_t x = 0; x < 4; ++x) star[x] = 0.99 * 0.5 + 0.01 * static_cast<double>(thm1_x2(x));
    out.full.p1.push_back(std::move(star));
    out.h_star = out.full.size() - 1;
    return out;
}

namespace {
DomainSpec basis_domain(std::size_t dim) {
    std::vector<DensityMatrix> xs;
    for (std::size_t i = 0; i < dim; ++i) xs.push_back(DensityMatrix::basis(dim, i));
    return DomainSpec::finite(std::move(xs));
}
} // namespace

HypothesisClass make_example1_class(const std::vector<double>& betas) {
    const std::size_t n = betas.size();
    if (n == 0 || n > 16) throw UsageError("example-1 truncation needs 1 <= n <= 16");
    for (double b : betas) {
        if (!(b > 0.5 && b < 1.0)) throw UsageError("every beta must lie in (1/2, 1)");
    }
    std::vector<std::vector<double>> grid;
    grid.reserve(std::size_t{1} << n);
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
        std::vector<double> bits(n);
        for (std::size_t j = 0; j < n; ++j) bits[j] = static_cast<double>((code >> j) & 1U);
        grid.push_back(std::move(bits));
    }
    const auto gen = [betas](std::span<const double> bits) {
        const auto dim = static_cast<Eigen::Index>(betas.size());
        ComplexMatrix pi0 = ComplexMatrix::Zero(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double beta = betas[static_cast<std::size_t>(j)];
            pi0(j, j) = bits[static_cast<std::size_t>(j)] > 0.5 ? 1.0 - beta : beta;
        }
        return Povm::binary(pi0);
    };
    return HypothesisClass::parameterized("example1", std::move(grid), gen, basis_domain(n));
}

namespace {

ComplexMatrix single_qubit_layer_op(std::size_t num_qubits, std::size_t qubit, const Eigen::Matrix2cd& gate) {
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (std::size_t q = 0; q < num_qubits; ++q) {
        const ComplexMatrix factor = q == qubit ? ComplexMatrix(gate) : ComplexMatrix(ComplexMatrix::Identity(2, 2));
        ComplexMatrix next(op.rows() * 2, op.cols() * 2);
        // Kronecker product, qubit 0 most significant.
        for (Eigen::Index i = 0; i < op.rows(); ++i) {
            for (Eigen::Index j = 0; j < op.cols(); ++j) {
                next.block(i * 2, j * 2, 2, 2) = op(i, j) * factor;
            }
        }
        op = std::move(next);
    }
    return op;
}

} // namespace

ComplexMatrix qnn_unitary(std::size_t num_qubits, std::size_t layers, std::span<const double> params) {
    if (num_qubits == 0 || num_qubits > 8) throw UsageError("qnn: 1..8 qubits supported");
    if (params.size() != 2 * num_qubits * layers) {
        throw UsageError("qnn: expected " + std::to_string(2 * num_qubits * layers) + " parameters, got " +
                         std::to_string(params.size()));
    }
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    const Complex i1(0.0, 1.0);
    std::size_t k = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            const double theta = params[k++];
            const double phi = params[k++];
            Eigen::Matrix2cd ry;
            ry << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
            Eigen::Matrix2cd rz;
            rz << std::exp(-i1 * phi / 2.0), 0.0, 0.0, std::exp(i1 * phi / 2.0);
            u = single_qubit_layer_op(num_qubits, q, rz * ry) * u;
        }
        if (num_qubits > 1) {
            // CZ on (q, q+1): phase -1 when both bits are set.
            ComplexMatrix cz = ComplexMatrix::Identity(dim, dim);
            for (Eigen::Index basis = 0; basis < dim; ++basis) {
                int sign = 1;
                for (std::size_t q = 0; q + 1 < num_qubits; ++q) {
                    const auto shift_a = num_qubits - 1 - q;
                    const auto shift_b = num_qubits - 2 - q;
                    if (((basis >> shift_a) & 1) && ((basis >> shift_b) & 1)) sign = -sign;
                }
                cz(basis, basis) = static_cast<double>(sign);
            }
            u = cz * u;
        }
    }
    return u;
}

Povm conjugate_povm(const Povm& povm, const ComplexMatrix& unitary) {
    if (static_cast<std::size_t>(unitary.rows()) != povm.dim() || unitary.cols() != unitary.rows()) {
        throw DimensionError("conjugate_povm: unitary dimension mismatch");
    }
    const auto n = unitary.rows();
    const double defect = max_abs_entry(unitary.adjoint() * unitary - ComplexMatrix::Identity(n, n));
    if (defect > tolerances().herm * static_cast<double>(n) * 10.0) {
        throw UsageError("conjugate_povm: generator output is not unitary (defect " + std::to_string(defect) + ")");
    }
    std::vector<ComplexMatrix> effects;
    for (std::size_t j = 0; j < povm.outcomes(); ++j) {
        ComplexMatrix e = unitary.adjoint() * povm.effect(j) * unitary;
        effects.push_back(0.5 * (e + e.adjoint()));
    }
    return Povm(effects);
}

HypothesisClass make_qnn_class(std::size_t num_qubits, std::size_t layers,
                               std::vector<std::vector<double>> param_grid, const Povm& fixed_measurement) {
    const std::size_t dim = std::size_t{1} << num_qubits;
    if (fixed_measurement.dim() != dim) throw DimensionError("qnn: fixed measurement dimension mismatch");
    if (param_grid.empty()) throw UsageError("qnn: empty parameter grid");
    const auto gen = [num_qubits, layers, fixed_measurement](std::span<const double> theta) {
        return conjugate_povm(fixed_measurement, qnn_unitary(num_qubits, layers, theta));
    };
    return HypothesisClass::parameterized("qnn_ry_rz_cz", std::move(param_grid), gen, DomainSpec::all_states(dim));
}

HypothesisClass pocc_to_povm(const PoccClass& pocc) {
    pocc.validate();
    std::vector<ClassicalChannel> channels;
    channels.reserve(pocc.size());
    for (const auto& h : pocc.p1) channels.push_back(ClassicalChannel::from_p1(h));
    return HypothesisClass::jointly_measurable(Povm::computational_basis(pocc.domain_size), std::move(channels),
                                               basis_domain(pocc.domain_size));
}

HypothesisClass make_diag_family(const std::vector<double>& values) {
    std::vector<Povm> members;
    members.reserve(values.size());
    for (double t : values) members.push_back(Povm::binary(t * ComplexMatrix::Identity(2, 2)));
    return HypothesisClass::finite(std::move(members), DomainSpec::all_states(2));
}

HypothesisClass make_orthogonal_projectors(std::size_t dim) {
    std::vector<Povm> members;
    for (std::size_t i = 0; i < dim; ++i) members.push_back(Povm::binary(basis_projector(dim, i)));
    return HypothesisClass::finite(std::move(members), DomainSpec::all_states(dim));
}

HypothesisClass make_planted_class(const std::vector<double>& constants) {
    std::vector<Povm> members;
    members.push_back(Povm::binary(basis_projector(2, 0)));
    for (double t : constants) members.push_back(Povm::binary(t * ComplexMatrix::Identity(2, 2)));
    return HypothesisClass::finite(std::move(members), basis_domain(2));
}

} // namespace povm
