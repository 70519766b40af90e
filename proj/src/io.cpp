#include "padic/io.hpp"

#include <fstream>

namespace padic {

Json rat_to_json(const Rat& q) {
    return rat_str(q);
}

Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat((long)j.get<long long>());
    if (j.is_string()) return parse_rat(j.get<std::string>());
    throw input_error("expected rational as string or integer");
}

Json scalar_to_json(const Scalar& s) {
    return s.str();
}

Scalar scalar_from_json(unsigned p, const Json& j) {
    if (j.is_number_integer()) return Scalar(p, Rat((long)j.get<long long>()));
    if (j.is_string()) return Scalar::parse(p, j.get<std::string>());
    throw input_error("expected scalar as string or integer");
}

Json laurent_to_json(const Laurent& l) {
    Json arr = Json::array();
    for (const auto& [k, c] : l.terms()) {
        Json term = Json::array();
        for (int e : k) term.push_back(e);
        term.push_back(scalar_to_json(c));
        arr.push_back(term);
    }
    return arr;
}

Laurent laurent_from_json(unsigned p, unsigned nparams, const Json& j) {
    if (!j.is_array()) throw input_error("laurent element must be a term array");
    Laurent l(p, nparams);
    for (const auto& term : j) {
        if (!term.is_array() || term.size() != 2 + nparams)
            throw input_error("laurent term must be [i, j1.., jk, scalar]");
        Laurent::Key key(1 + nparams);
        for (unsigned v = 0; v < 1 + nparams; ++v) key[v] = term[v].get<int>();
        l.add_term(key, scalar_from_json(p, term[1 + nparams]));
    }
    return l;
}

namespace {

Json annulus_to_json(const Annulus& a) {
    return Json{{"r_min", rat_to_json(a.r_min)},
                {"r_max", rat_to_json(a.r_max)},
                {"open_at_boundary", a.open_at_boundary}};
}

Annulus annulus_from_json(const Json& j) {
    Annulus a;
    a.r_min = rat_from_json(j.at("r_min"));
    a.r_max = rat_from_json(j.at("r_max"));
    a.open_at_boundary = j.value("open_at_boundary", true);
    return a;
}

Json matrix_to_json(const LMat& N) {
    Json rows = Json::array();
    for (unsigned i = 0; i < N.rows(); ++i) {
        Json row = Json::array();
        for (unsigned j = 0; j < N.cols(); ++j) row.push_back(laurent_to_json(N.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

LMat matrix_from_json(unsigned p, unsigned rank, unsigned nparams, const Json& j) {
    LMat N(rank, rank, p, nparams);
    if (!j.is_array() || j.size() != rank) throw input_error("matrix row count mismatch");
    for (unsigned i = 0; i < rank; ++i) {
        if (!j[i].is_array() || j[i].size() != rank)
            throw input_error("matrix column count mismatch");
        for (unsigned c = 0; c < rank; ++c)
            N.at(i, c) = laurent_from_json(p, nparams, j[i][c]);
    }
    return N;
}

}  // namespace

Json module_to_json(const DiffModule& M) {
    Json j{{"schema_version", kSchemaVersion},
           {"p", M.prime()},
           {"rank", M.rank()},
           {"convention", convention_str(M.convention())},
           {"annulus", annulus_to_json(M.annulus())},
           {"matrix", matrix_to_json(M.matrix())}};
    if (!M.param_radii().empty()) {
        Json pr = Json::array();
        for (const auto& r : M.param_radii()) pr.push_back(rat_to_json(r));
        j["param_radii"] = pr;
    }
    return j;
}

DiffModule module_from_json(const Json& j) {
    unsigned p = j.at("p").get<unsigned>();
    unsigned rank = j.at("rank").get<unsigned>();
    Convention conv = parse_convention(j.at("convention").get<std::string>());
    Annulus ann = annulus_from_json(j.at("annulus"));
    std::vector<LogRadius> pr;
    if (j.contains("param_radii"))
        for (const auto& x : j.at("param_radii")) pr.push_back(rat_from_json(x));
    LMat N = matrix_from_json(p, rank, static_cast<unsigned>(pr.size()), j.at("matrix"));
    return DiffModule(p, rank, conv, ann, std::move(N), std::move(pr));
}

Json family_to_json(const FamilyModule& F) {
    Json boxes = Json::array();
    for (const auto& b : F.boxes())
        boxes.push_back(Json{{"r_min", rat_to_json(b.r_min)}, {"r_max", rat_to_json(b.r_max)}});
    return Json{{"schema_version", kSchemaVersion},
                {"p", F.prime()},
                {"rank", F.rank()},
                {"convention", convention_str(F.convention())},
                {"annulus", annulus_to_json(F.annulus())},
                {"parameters", boxes},
                {"matrix", matrix_to_json(F.matrix())}};
}

FamilyModule family_from_json(const Json& j) {
    unsigned p = j.at("p").get<unsigned>();
    unsigned rank = j.at("rank").get<unsigned>();
    Convention conv = parse_convention(j.at("convention").get<std::string>());
    Annulus ann = annulus_from_json(j.at("annulus"));
    std::vector<ParamBox> boxes;
    for (const auto& b : j.at("parameters"))
        boxes.push_back({rat_from_json(b.at("r_min")), rat_from_json(b.at("r_max"))});
    LMat N = matrix_from_json(p, rank, static_cast<unsigned>(boxes.size()), j.at("matrix"));
    return FamilyModule(p, rank, conv, ann, std::move(N), std::move(boxes));
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw input_error("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace padic
