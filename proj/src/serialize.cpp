#include "qlab/serialize.hpp"

#include <fstream>

namespace qlab {

Json field_to_json(const Field& f) {
    return Json{{"a", f.degree()}, {"modulus_bits", f.modulus_bits()}};
}

Field field_from_json(const Json& j) {
    const unsigned a = j.at("a").get<unsigned>();
    if (j.contains("modulus_bits")) return Field(a, j.at("modulus_bits").get<uint32_t>());
    return Field(a);
}

Json lde_params_to_json(const LdeParams& p) {
    return Json{{"field", field_to_json(p.field)}, {"d", p.d}, {"h_size", p.h_size}};
}

LdeParams lde_params_from_json(const Json& j) {
    return LdeParams(field_from_json(j.at("field")), j.at("d").get<unsigned>(),
                     j.at("h_size").get<uint32_t>());
}

Json data_table_to_json(const LdeParams& p, const DataTable& t) {
    Json values = Json::array();
    for (const auto& v : t.values) values.push_back(v.value);
    return Json{{"params", lde_params_to_json(p)}, {"values", std::move(values)}};
}

std::pair<LdeParams, DataTable> data_table_from_json(const Json& j) {
    LdeParams params = lde_params_from_json(j.at("params"));
    std::vector<uint32_t> raw;
    for (const auto& v : j.at("values")) raw.push_back(v.get<uint32_t>());
    DataTable table = data_table_from_values(params, raw);
    return {std::move(params), std::move(table)};
}

Json point_to_json(const Point& p) {
    Json out = Json::array();
    for (const auto& c : p) out.push_back(c.value);
    return out;
}

Point point_from_json(const Field& f, const Json& j) {
    Point p;
    for (const auto& v : j) p.push_back(f.elem(v.get<uint32_t>()));
    return p;
}

Json line_to_json(const Line& l) {
    return Json{{"base", point_to_json(l.base)}, {"dir", point_to_json(l.dir)}};
}

Line line_from_json(const Field& f, const Json& j) {
    return Line{point_from_json(f, j.at("base")), point_from_json(f, j.at("dir"))};
}

Json subspace_to_json(const AffineSubspace& s) {
    Json dirs = Json::array();
    for (const auto& d : s.dirs()) dirs.push_back(point_to_json(d));
    return Json{{"base", point_to_json(s.base())}, {"dirs", std::move(dirs)}};
}

AffineSubspace subspace_from_json(const Field& f, const Json& j) {
    Point base = point_from_json(f, j.at("base"));
    std::vector<Point> dirs;
    for (const auto& d : j.at("dirs")) dirs.push_back(point_from_json(f, d));
    return AffineSubspace::from_generators(std::move(base), std::move(dirs));
}

Json unipoly_to_json(const UniPoly& p) {
    Json coeffs = Json::array();
    for (const auto& c : p.coeffs()) coeffs.push_back(c.value);
    return Json{{"coeffs", std::move(coeffs)}};
}

UniPoly unipoly_from_json(const Field& f, const Json& j) {
    std::vector<FieldElem> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(f.elem(c.get<uint32_t>()));
    return UniPoly(f, std::move(coeffs));
}

Json multipoly_to_json(const MultiPoly& p) {
    Json terms = Json::array();
    for (const auto& [e, c] : p.terms()) {
        Json exps = Json::array();
        for (uint16_t x : e) exps.push_back(x);
        terms.push_back(Json::array({std::move(exps), c.value}));
    }
    return Json{{"nvars", p.nvars()}, {"terms", std::move(terms)}};
}

MultiPoly multipoly_from_json(const Field& f, const Json& j) {
    MultiPoly p(f, j.at("nvars").get<unsigned>());
    for (const auto& term : j.at("terms")) {
        std::vector<uint16_t> exps;
        for (const auto& e : term.at(0)) exps.push_back(e.get<uint16_t>());
        p.add_term(std::move(exps), f.elem(term.at(1).get<uint32_t>()));
    }
    return p;
}

Json state_to_json(const QuantumState& s) {
    const uint32_t q = s.field().order();
    Json amps = Json::array();
    for (const auto& [k, a] : s.amplitudes()) {
        const Point z = point_from_index(s.field(), s.dim_d(), k / q);
        amps.push_back(Json::array(
            {point_to_json(z), static_cast<uint32_t>(k % q), a.real(), a.imag()}));
    }
    return Json{{"field", field_to_json(s.field())},
                {"d", s.dim_d()},
                {"qlde_form", s.qlde_form()},
                {"amplitudes", std::move(amps)}};
}

QuantumState state_from_json(const Json& j) {
    const Field f = field_from_json(j.at("field"));
    QuantumState s(f, j.at("d").get<unsigned>());
    for (const auto& entry : j.at("amplitudes")) {
        const Point z = point_from_json(f, entry.at(0));
        const FieldElem y = f.elem(entry.at(1).get<uint32_t>());
        s.set_amplitude(z, y,
                        std::complex<double>(entry.at(2).get<double>(), entry.at(3).get<double>()));
    }
    s.set_qlde_form(j.value("qlde_form", false));
    return s;
}

Json verdict_distribution_to_json(const VerdictDistribution& d) {
    Json counts = Json::object();
    Json probs = Json::object();
    for (const auto& [v, n] : d.counts) {
        counts[v.to_string()] = n;
        probs[v.to_string()] = static_cast<double>(n) / static_cast<double>(d.total);
    }
    return Json{{"total", d.total}, {"counts", std::move(counts)}, {"probabilities", std::move(probs)}};
}

Json acceptance_report_to_json(const AcceptanceReport& r) {
    return Json{{"gamma", r.gamma}, {"method", r.method}, {"trials", r.trials},
                {"stderr", r.stderr_est}};
}

Json gap_instance_to_json(const GapInstance& x) {
    Json preds = Json::array();
    for (const auto& p : x.predicates) {
        Json sat = Json::array();
        for (const auto& row : p.sat) sat.push_back(row);
        preds.push_back(Json{{"vars", p.vars}, {"sat", std::move(sat)}});
    }
    return Json{{"m", x.m}, {"s", x.s}, {"q", x.q}, {"eps", x.eps}, {"predicates", std::move(preds)}};
}

GapInstance gap_instance_from_json(const Json& j) {
    GapInstance x;
    x.m = j.at("m").get<uint32_t>();
    x.s = j.at("s").get<uint32_t>();
    x.q = j.at("q").get<uint32_t>();
    x.eps = j.value("eps", 0.5);
    for (const auto& p : j.at("predicates")) {
        GapPredicate pred;
        pred.vars = p.at("vars").get<std::vector<uint32_t>>();
        for (const auto& row : p.at("sat")) pred.sat.push_back(row.get<std::vector<uint32_t>>());
        x.predicates.push_back(std::move(pred));
    }
    x.validate();
    return x;
}

Json proof_blocks_to_json(const ProofBlocks& blocks, const Field& f) {
    (void)f;
    Json out = Json::array();
    for (const auto& [key, poly] : blocks.all()) {
        out.push_back(Json{{"j", key.first}, {"skey", key.second}, {"poly", multipoly_to_json(poly)}});
    }
    return Json{{"blocks", std::move(out)}};
}

ProofBlocks proof_blocks_from_json(const Field& f, const Json& j) {
    ProofBlocks blocks;
    for (const auto& entry : j.at("blocks")) {
        ProofBlocks::Key key{entry.at("j").get<uint32_t>(),
                             entry.at("skey").get<std::vector<uint64_t>>()};
        blocks.mutable_all().insert_or_assign(std::move(key),
                                              multipoly_from_json(f, entry.at("poly")));
    }
    return blocks;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace qlab
