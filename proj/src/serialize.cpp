#include "povm/serialize.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "povm/errors.hpp"
#include "povm/hashing.hpp"

namespace povm {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<double> number_list(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(std::string(what) + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

Json matrix_to_json(const ComplexMatrix& m) {
    const auto n = checked_dim(m);
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    }
    return Json{{"dim", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
    const auto dim = field(j, "dim").get<std::int64_t>();
    if (dim <= 0 || static_cast<std::size_t>(dim) > kMaxDim) throw ConfigError("matrix dim out of range");
    const auto re = number_list(field(j, "re"), "re");
    const auto im = j.contains("im") ? number_list(j.at("im"), "im") : std::vector<double>(re.size(), 0.0);
    const auto n = static_cast<std::size_t>(dim);
    if (re.size() != n * n || im.size() != n * n) throw ConfigError("matrix entry count is not dim^2");
    ComplexMatrix m(dim, dim);
    for (std::size_t k = 0; k < n * n; ++k) {
        m(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) = Complex(re[k], im[k]);
    }
    return m;
}

Json povm_to_json(const Povm& p) {
    Json effects = Json::array();
    for (const auto& e : p.effects()) effects.push_back(matrix_to_json(e.op()));
    return Json{{"effects", std::move(effects)}};
}

Povm povm_from_json(const Json& j) {
    if (j.contains("pi0")) return Povm::binary(matrix_from_json(j.at("pi0")));
    std::vector<ComplexMatrix> effects;
    for (const auto& e : field(j, "effects")) effects.push_back(matrix_from_json(e));
    return Povm(effects);
}

std::string povm_hash(const Povm& p) { return content_hash(povm_to_json(p).dump()); }

Json channel_to_json(const ClassicalChannel& c) {
    Json probs = Json::array();
    for (std::size_t z = 0; z < c.inputs(); ++z) {
        for (std::size_t y = 0; y < c.outputs(); ++y) probs.push_back(c.prob(y, z));
    }
    return Json{{"rows", c.inputs()}, {"cols", c.outputs()}, {"probs", std::move(probs)}};
}

ClassicalChannel channel_from_json(const Json& j) {
    const auto rows = field(j, "rows").get<std::size_t>();
    const auto cols = field(j, "cols").get<std::size_t>();
    const auto probs = number_list(field(j, "probs"), "probs");
    if (probs.size() != rows * cols) throw ConfigError("channel probs length is not rows*cols");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t k = 0; k < probs.size(); ++k) {
        m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = probs[k];
    }
    return ClassicalChannel(m);
}

Json domain_to_json(const DomainSpec& d) {
    if (d.is_all_states()) return Json{{"all_states", d.dim()}};
    Json states = Json::array();
    for (const auto& s : d.states()) states.push_back(matrix_to_json(s.op()));
    return Json{{"states", std::move(states)}};
}

DomainSpec domain_from_json(const Json& j) {
    if (j.contains("all_states")) return DomainSpec::all_states(j.at("all_states").get<std::size_t>());
    if (j.contains("basis")) {
        const auto dim = j.at("basis").get<std::size_t>();
        std::vector<DensityMatrix> xs;
        for (std::size_t i = 0; i < dim; ++i) xs.push_back(DensityMatrix::basis(dim, i));
        return DomainSpec::finite(std::move(xs));
    }
    std::vector<DensityMatrix> xs;
    for (const auto& s : field(j, "states")) xs.emplace_back(matrix_from_json(s));
    return DomainSpec::finite(std::move(xs));
}

Json element_to_json(const ApproxJmElement& e, const DomainSpec& domain) {
    Json povms = Json::object();
    const auto ref = [&povms](const Povm& p) {
        Json body = povm_to_json(p);
        std::string h = content_hash(body.dump());
        povms[h] = std::move(body);
        return h;
    };
    Json members = Json::array();
    const std::string center = ref(e.center());
    for (const auto& m : e.members()) {
        members.push_back(Json{{"member", ref(m.member)}, {"root", ref(m.root)}, {"channel", channel_to_json(m.channel)}});
    }
    return Json{{"gamma", e.gamma()}, {"center", center}, {"members", std::move(members)},
                {"povms", std::move(povms)}, {"domain", domain_to_json(domain)}};
}

ApproxJmElement element_from_json(const Json& j) {
    const Json& povms = field(j, "povms");
    std::map<std::string, Povm> cache;
    const auto lookup = [&](const Json& key) -> const Povm& {
        const auto h = key.get<std::string>();
        if (auto it = cache.find(h); it != cache.end()) return it->second;
        if (!povms.contains(h)) throw ConfigError("element references unknown POVM " + h);
        const Json& body = povms.at(h);
        if (content_hash(body.dump()) != h) throw ConfigError("POVM content does not match its hash " + h);
        return cache.emplace(h, povm_from_json(body)).first->second;
    };
    const DomainSpec domain = domain_from_json(field(j, "domain"));
    std::vector<JmMember> members;
    for (const auto& m : field(j, "members")) {
        members.push_back({lookup(m.at("member")), lookup(m.at("root")), channel_from_json(m.at("channel"))});
    }
    return ApproxJmElement(lookup(field(j, "center")), std::move(members), field(j, "gamma").get<double>(), domain);
}

Json distribution_to_json(const DataDistribution& d) {
    Json atoms = Json::array();
    for (const auto& a : d.atoms()) {
        atoms.push_back(Json{{"prob", a.prob}, {"state", matrix_to_json(a.state.op())}, {"p_label1", a.p_label1}});
    }
    return Json{{"atoms", std::move(atoms)}};
}

DataDistribution distribution_from_json(const Json& j) {
    if (j.contains("builtin")) {
        const auto name = j.at("builtin").get<std::string>();
        if (name == "counterexample") return thm1_distribution();
        if (name == "noisy_basis") return noisy_basis_distribution(j.value("noise", 0.1));
        throw ConfigError("unknown builtin distribution '" + name + "'");
    }
    std::map<std::string, Json> named;
    if (j.contains("states")) {
        for (const auto& [k, v] : j.at("states").items()) named.emplace(k, v);
    }
    std::vector<Atom> atoms;
    for (const auto& a : field(j, "atoms")) {
        const Json& s = field(a, "state");
        ComplexMatrix op;
        if (s.is_string()) {
            auto it = named.find(s.get<std::string>());
            if (it == named.end()) throw ConfigError("atom references unknown state '" + s.get<std::string>() + "'");
            op = matrix_from_json(it->second);
        } else {
            op = matrix_from_json(s);
        }
        atoms.push_back({field(a, "prob").get<double>(), DensityMatrix(op), field(a, "p_label1").get<double>()});
    }
    return DataDistribution(std::move(atoms));
}

namespace {

std::vector<std::vector<double>> grid_from_json(const Json& j) {
    std::vector<std::vector<double>> grid;
    for (const auto& row : j) grid.push_back(number_list(row, "grid row"));
    return grid;
}

HypothesisClass class_from_generator(const Json& g) {
    const auto name = field(g, "name").get<std::string>();
    if (name == "example1") return make_example1_class(number_list(field(g, "betas"), "betas"));
    if (name == "qnn") {
        return make_qnn_class(field(g, "qubits").get<std::size_t>(), field(g, "layers").get<std::size_t>(),
                              grid_from_json(field(g, "grid")), povm_from_json(field(g, "measurement")));
    }
    if (name == "counterexample") {
        const double alpha = g.value("alpha", 0.05);
        const auto classes = make_thm1_classes(thm1_z_grid(g.value("z_count", std::size_t{11}), alpha), alpha);
        return pocc_to_povm(classes.full);
    }
    if (name == "diag_family") return make_diag_family(number_list(field(g, "values"), "values"));
    if (name == "planted") return make_planted_class(number_list(field(g, "constants"), "constants"));
    if (name == "orthogonal_projectors") return make_orthogonal_projectors(field(g, "dim").get<std::size_t>());
    throw ConfigError("unknown generator '" + name + "'");
}

} // namespace

HypothesisClass class_from_json(const Json& j) {
    if (j.contains("generator")) return class_from_generator(j.at("generator"));
    const auto variant = field(j, "variant").get<std::string>();
    const auto dim = field(j, "dim").get<std::size_t>();
    const DomainSpec domain = j.contains("domain") ? domain_from_json(j.at("domain")) : DomainSpec::all_states(dim);
    if (domain.dim() != dim) throw ConfigError("domain dimension differs from class dim");
    if (variant == "finite") {
        std::vector<Povm> members;
        for (const auto& m : field(j, "members")) members.push_back(povm_from_json(m));
        return HypothesisClass::finite(std::move(members), domain);
    }
    if (variant == "jointly_measurable") {
        std::vector<ClassicalChannel> channels;
        for (const auto& c : field(j, "channels")) channels.push_back(channel_from_json(c));
        return HypothesisClass::jointly_measurable(povm_from_json(field(j, "root")), std::move(channels), domain);
    }
    if (variant == "approx_jm_partitioned") {
        Partition p;
        std::size_t next = 0;
        for (const auto& e : field(j, "elements")) {
            p.elements.push_back(element_from_json(e));
            std::vector<std::size_t> ids;
            if (e.contains("member_ids")) {
                ids = e.at("member_ids").get<std::vector<std::size_t>>();
            } else {
                for (std::size_t k = 0; k < p.elements.back().size(); ++k) ids.push_back(next++);
            }
            p.member_ids.push_back(std::move(ids));
        }
        return HypothesisClass::partitioned(std::move(p), domain);
    }
    if (variant == "parameterized") throw ConfigError("parameterized classes need a 'generator' block");
    throw ConfigError("unknown class variant '" + variant + "'");
}

Json class_to_json(const HypothesisClass& c) {
    Json j{{"variant", c.variant_name()}, {"dim", c.domain().dim()}, {"domain", domain_to_json(c.domain())}};
    switch (c.variant()) {
    case HypothesisClass::Variant::JointlyMeasurable: {
        j["variant"] = "jointly_measurable";
        j["root"] = povm_to_json(c.root());
        Json chans = Json::array();
        for (const auto& ch : c.channels()) chans.push_back(channel_to_json(ch));
        j["channels"] = std::move(chans);
        break;
    }
    case HypothesisClass::Variant::ApproxJmPartitioned: {
        Json elems = Json::array();
        const auto& p = c.partition();
        for (std::size_t e = 0; e < p.elements.size(); ++e) {
            Json ej = element_to_json(p.elements[e], c.domain());
            ej["member_ids"] = p.member_ids[e];
            elems.push_back(std::move(ej));
        }
        j["elements"] = std::move(elems);
        break;
    }
    case HypothesisClass::Variant::Finite:
    case HypothesisClass::Variant::Parameterized: {
        // Parameterized classes are written out as their explicit member list.
        j["variant"] = "finite";
        Json members = Json::array();
        for (const auto& m : c.members()) members.push_back(povm_to_json(m));
        j["members"] = std::move(members);
        break;
    }
    }
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

} // namespace povm
