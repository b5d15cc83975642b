#pragma once

#include <string>

#include <json.hpp>

#include "povm/calculus.hpp"
#include "povm/data.hpp"
#include "povm/zoo.hpp"

namespace povm {

using Json = nlohmann::json;

// {"dim": n, "re": [row-major], "im": [row-major]}
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// {"effects": [matrix, ...]}; reading also accepts {"pi0": matrix} for two outcomes.
Json povm_to_json(const Povm& p);
Povm povm_from_json(const Json& j);
std::string povm_hash(const Povm& p);

// {"rows": k, "cols": l, "probs": [row-major alpha(y|z)]}
Json channel_to_json(const ClassicalChannel& c);
ClassicalChannel channel_from_json(const Json& j);

// {"all_states": dim} or {"states": [matrix, ...]}
Json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const Json& j);

// POVMs are stored once in "povms" keyed by content hash; the element refers to them by hash.
Json element_to_json(const ApproxJmElement& e, const DomainSpec& domain);
ApproxJmElement element_from_json(const Json& j);

// {"atoms": [{"prob", "state": matrix | "name", "p_label1"}], "states": {name: matrix}}
Json distribution_to_json(const DataDistribution& d);
DataDistribution distribution_from_json(const Json& j);

// Class description files. Variants:
//   {"variant": "finite", "dim": n, "domain": ..., "members": [povm, ...]}
//   {"variant": "jointly_measurable", "dim": n, "domain": ..., "root": povm, "channels": [channel, ...]}
//   {"variant": "approx_jm_partitioned", "dim": n, "domain": ..., "elements": [element, ...]}
//   {"variant": "parameterized", "dim": n, "generator": {"name": ansatz, ...}}
// Named generators: example1 {betas}, qnn {qubits, layers, grid, measurement},
// thm1 {z_count, alpha}, diag_family {values}, planted {constants},
// orthogonal_projectors {dim}.
HypothesisClass class_from_json(const Json& j);
Json class_to_json(const HypothesisClass& c);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace povm
