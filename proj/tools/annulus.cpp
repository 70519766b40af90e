#include <CLI11.hpp>

#include <iostream>

#include "padic/catalog.hpp"
#include "padic/decomp.hpp"
#include "padic/exponents.hpp"
#include "padic/hensel.hpp"
#include "padic/io.hpp"

using namespace padic;

namespace {

std::vector<LogRadius> parse_grid(const std::string& spec) {
    // "a:b:n" -> n points linearly spaced from a to b, or comma list "a,b,c".
    if (spec.find(':') == std::string::npos) {
        std::vector<LogRadius> out;
        size_t pos = 0;
        while (pos < spec.size()) {
            size_t c = spec.find(',', pos);
            if (c == std::string::npos) c = spec.size();
            out.push_back(parse_rat(spec.substr(pos, c - pos)));
            pos = c + 1;
        }
        return out;
    }
    size_t c1 = spec.find(':'), c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw input_error("grid spec must be a:b:n or a,b,c");
    Rat a = parse_rat(spec.substr(0, c1));
    Rat b = parse_rat(spec.substr(c1 + 1, c2 - c1 - 1));
    long n = std::stol(spec.substr(c2 + 1));
    if (n < 2) throw input_error("grid needs at least 2 points");
    std::vector<LogRadius> out;
    Rat step = (b - a) / Rat(n - 1);
    for (long i = 0; i < n; ++i) {
        Rat r = a + step * Rat(i);
        r.canonicalize();
        out.push_back(r);
    }
    return out;
}

std::vector<Rat> parse_rat_list(const std::string& spec) {
    std::vector<Rat> out;
    size_t pos = 0;
    while (pos < spec.size()) {
        size_t c = spec.find(',', pos);
        if (c == std::string::npos) c = spec.size();
        out.push_back(parse_rat(spec.substr(pos, c - pos)));
        pos = c + 1;
    }
    return out;
}

DiffModule load_module(const std::string& path) {
    return module_from_json(load_json_file(path));
}

Laurent parse_laurent_inline(unsigned p, unsigned nparams, const std::string& text) {
    return laurent_from_json(p, nparams, Json::parse(text));
}

void emit(const Json& j, bool as_json) {
    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    // Human-readable fallback: compact key: value lines.
    for (auto it = j.begin(); it != j.end(); ++it)
        std::cout << it.key() << ": " << it.value().dump() << "\n";
}

Json bound_to_json(const RadiusBound& b) {
    return Json{{"level", b.level},
                {"lower", rat_to_json(b.lower)},
                {"upper", rat_to_json(b.upper)},
                {"cert", b.cert == RadiusBound::Cert::newton_exact ? "newton_exact"
                                                                   : "spectral_truncated"},
                {"budget", b.budget}};
}

std::vector<std::vector<FiberPoint>> parse_points(unsigned p, const std::string& spec) {
    // "gauss:0,x:1,x:3" -> one single-parameter point per entry.
    std::vector<std::vector<FiberPoint>> out;
    size_t pos = 0;
    while (pos < spec.size()) {
        size_t c = spec.find(',', pos);
        if (c == std::string::npos) c = spec.size();
        std::string item = spec.substr(pos, c - pos);
        pos = c + 1;
        size_t colon = item.find(':');
        if (colon == std::string::npos) throw input_error("point spec must be gauss:r or x:value");
        std::string kind = item.substr(0, colon), val = item.substr(colon + 1);
        if (kind == "gauss")
            out.push_back({FiberPoint::gauss(parse_rat(val))});
        else if (kind == "x")
            out.push_back({FiberPoint::classical(Scalar::parse(p, val))});
        else
            throw input_error("unknown point kind: " + kind);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact invariants of p-adic differential modules on annuli"};
    app.require_subcommand(1);
    app.fallthrough();
    bool json_out = false;
    app.add_flag("--json", json_out, "machine-readable JSON output");

    // ---- example
    auto* ex_cmd = app.add_subcommand("example", "emit a built-in fixture");
    std::string ex_name, ex_emit = "json", ex_out, ex_iota, ex_f, ex_slope;
    unsigned ex_p = 3, ex_n = 2, ex_m = 1;
    ex_cmd->add_option("--name", ex_name, "fixture name")->required();
    ex_cmd->add_option("--p", ex_p, "prime");
    ex_cmd->add_option("--n", ex_n, "rank for trivial/exponent");
    ex_cmd->add_option("--m", ex_m, "break parameter");
    ex_cmd->add_option("--iota", ex_iota, "comma list of exponents");
    ex_cmd->add_option("--f", ex_f, "comma list f_1..f_m (artin-schreier)");
    ex_cmd->add_option("--iota-slope", ex_slope, "comma list b_i (exponent-family)");
    ex_cmd->add_option("--emit", ex_emit, "json");
    ex_cmd->add_option("-o,--output", ex_out, "write to file");

    // ---- radii
    auto* radii_cmd = app.add_subcommand("radii", "subsidiary radii at one radius");
    std::string rd_module, rd_r;
    unsigned rd_scap = 64, rd_pcap = 3;
    radii_cmd->add_option("--module", rd_module)->required();
    radii_cmd->add_option("--r", rd_r, "log-radius (rational)")->required();
    radii_cmd->add_option("--spectral-cap", rd_scap);
    radii_cmd->add_option("--pushforward-cap", rd_pcap);

    // ---- profile
    auto* prof_cmd = app.add_subcommand("profile", "convex radius profile over a grid");
    std::string pf_module, pf_grid = "1/8:2:5";
    unsigned pf_level = 1, pf_pcap = 3;
    prof_cmd->add_option("--module", pf_module)->required();
    prof_cmd->add_option("--grid", pf_grid, "a:b:n or comma list");
    prof_cmd->add_option("--level", pf_level);
    prof_cmd->add_option("--pushforward-cap", pf_pcap);

    // ---- breaks
    auto* brk_cmd = app.add_subcommand("breaks", "boundary break slopes");
    std::string bk_module, bk_grid = "1/8,1/4,1/2,1";
    unsigned bk_pcap = 3;
    brk_cmd->add_option("--module", bk_module)->required();
    brk_cmd->add_option("--grid", bk_grid, "near-boundary grid");
    brk_cmd->add_option("--pushforward-cap", bk_pcap);

    // ---- decompose
    auto* dec_cmd = app.add_subcommand("decompose", "slope decomposition");
    std::string dc_module, dc_grid = "1/8,1/4,1/2,1,2", dc_out;
    std::string dc_target = "24";
    unsigned dc_iters = 64;
    dec_cmd->add_option("--module", dc_module)->required();
    dec_cmd->add_option("--grid", dc_grid);
    dec_cmd->add_option("--target", dc_target, "residual valuation target");
    dec_cmd->add_option("--iter-budget", dc_iters);
    dec_cmd->add_option("-o,--output", dc_out, "write factor JSON to file");

    // ---- exponents
    auto* exp_cmd = app.add_subcommand("exponents", "exponent recovery for regular modules");
    std::string xp_module, xp_interval = "1/2:2";
    unsigned xp_level = 3, xp_budget = 256;
    exp_cmd->add_option("--module", xp_module)->required();
    exp_cmd->add_option("--level", xp_level, "precision m");
    exp_cmd->add_option("--interval", xp_interval, "closed log-interval r1:r2");
    exp_cmd->add_option("--budget", xp_budget);

    // ---- pushforward
    auto* push_cmd = app.add_subcommand("pushforward", "Frobenius pushforward along t -> t^p");
    std::string ps_module, ps_out;
    push_cmd->add_option("--module", ps_module)->required();
    push_cmd->add_option("-o,--output", ps_out);

    // ---- pullback
    auto* pull_cmd = app.add_subcommand("pullback", "pullback along t = g(u)");
    std::string pl_module, pl_g, pl_out, pl_rprobe = "1/2", pl_ann;
    pull_cmd->add_option("--module", pl_module)->required();
    pull_cmd->add_option("--g", pl_g, "substitution as JSON term list")->required();
    pull_cmd->add_option("--r-probe", pl_rprobe);
    pull_cmd->add_option("--annulus", pl_ann, "new annulus r1:r2");
    pull_cmd->add_option("-o,--output", pl_out);

    // ---- hensel-lift
    auto* hl_cmd = app.add_subcommand("hensel-lift", "Newton-Raphson root lifting");
    std::string hl_poly, hl_target = "20";
    unsigned hl_iters = 64;
    hl_cmd->add_option("--poly", hl_poly, "JSON {p, coeffs, x0}")->required();
    hl_cmd->add_option("--target", hl_target);
    hl_cmd->add_option("--iter-budget", hl_iters);

    // ---- frobenius-verify
    auto* fv_cmd = app.add_subcommand("frobenius-verify", "check a Frobenius structure");
    std::string fv_module, fv_phi, fv_matrix, fv_tol = "4";
    fv_cmd->add_option("--module", fv_module)->required();
    fv_cmd->add_option("--phi", fv_phi, "lift as JSON term list")->required();
    fv_cmd->add_option("--matrix", fv_matrix, "JSON file with {matrix: ...}")->required();
    fv_cmd->add_option("--tol", fv_tol);

    // ---- family
    auto* fam_cmd = app.add_subcommand("family", "parameterized families");
    auto* scan_cmd = fam_cmd->add_subcommand("scan", "semicontinuity scan");
    std::string sc_family, sc_points, sc_grid = "1/8,1/4";
    unsigned sc_level = 1;
    scan_cmd->add_option("--family", sc_family)->required();
    scan_cmd->add_option("--points", sc_points, "gauss:r or x:value, comma list")->required();
    scan_cmd->add_option("--level", sc_level);
    scan_cmd->add_option("--grid", sc_grid);
    auto* fc_cmd = fam_cmd->add_subcommand("frobenius-check", "partial-Frobenius constancy");
    std::string fc_family, fc_phi, fc_matrix, fc_rx = "1/4,1/2,1,2", fc_tg = "1/8,1/4", fc_tol = "4";
    fc_cmd->add_option("--family", fc_family)->required();
    fc_cmd->add_option("--phi-x", fc_phi, "lift in x as JSON term list")->required();
    fc_cmd->add_option("--matrix", fc_matrix, "JSON file with {matrix: ...}")->required();
    fc_cmd->add_option("--rx-grid", fc_rx);
    fc_cmd->add_option("--t-grid", fc_tg);
    fc_cmd->add_option("--tol", fc_tol);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ex_cmd) {
            ExampleParams prm;
            prm.p = ex_p;
            prm.n = ex_n;
            prm.m = ex_m;
            if (!ex_iota.empty()) prm.iota = parse_rat_list(ex_iota);
            if (!ex_f.empty()) prm.f = parse_rat_list(ex_f);
            if (!ex_slope.empty()) prm.iota_slope = parse_rat_list(ex_slope);
            Example ex = make_example(ex_name, prm);
            Json j = ex.is_family ? family_to_json(ex.family) : module_to_json(ex.module);
            if (!ex_out.empty()) {
                std::ofstream f(ex_out);
                f << j.dump(2) << "\n";
                std::cout << "wrote " << ex_out << "\n";
            } else
                std::cout << j.dump(2) << "\n";
        } else if (*radii_cmd) {
            DiffModule M = load_module(rd_module);
            LogRadius r = parse_rat(rd_r);
            auto nb = newton_radii(M, r, rd_pcap);
            auto sb = spectral_radius_bounds(M, r, rd_scap);
            Json out{{"schema_version", kSchemaVersion}, {"r", rat_to_json(r)}};
            Json arr = Json::array();
            for (const auto& b : nb) arr.push_back(bound_to_json(b));
            out["newton"] = arr;
            out["spectral"] = bound_to_json(sb.bound);
            out["spectral"]["estimate"] = rat_to_json(sb.estimate);
            emit(out, json_out);
        } else if (*prof_cmd) {
            DiffModule M = load_module(pf_module);
            auto prof = radius_profile(M, pf_level, parse_grid(pf_grid), pf_pcap);
            Json out{{"schema_version", kSchemaVersion}, {"level", prof.level}};
            Json bps = Json::array(), sl = Json::array(), vals = Json::array(),
                 samples = Json::array();
            for (const auto& b : prof.breakpoints) bps.push_back(rat_to_json(b));
            for (const auto& s : prof.slopes) sl.push_back(rat_to_json(s));
            for (const auto& v : prof.values) vals.push_back(rat_to_json(v));
            for (size_t i = 0; i < prof.grid.size(); ++i)
                samples.push_back(Json{{"r", rat_to_json(prof.grid[i])},
                                       {"lo", rat_to_json(prof.samples[i].lo)},
                                       {"hi", rat_to_json(prof.samples[i].hi)},
                                       {"exact", prof.samples[i].exact}});
            out["breakpoints"] = bps;
            out["slopes"] = sl;
            out["values"] = vals;
            out["samples"] = samples;
            emit(out, json_out);
        } else if (*brk_cmd) {
            DiffModule M = load_module(bk_module);
            auto bd = break_slopes(M, parse_grid(bk_grid), bk_pcap);
            Json bs = Json::array();
            for (const auto& b : bd.b) bs.push_back(rat_to_json(b));
            Json out{{"schema_version", kSchemaVersion},
                     {"breaks", bs},
                     {"solvable", bd.solvable}};
            if (!json_out) {
                std::cout << "b = [";
                for (size_t i = 0; i < bd.b.size(); ++i)
                    std::cout << (i ? ", " : "") << rat_str(bd.b[i]);
                std::cout << "]\n";
            } else
                emit(out, true);
        } else if (*dec_cmd) {
            DiffModule M = load_module(dc_module);
            auto dec = slope_decompose(M, parse_grid(dc_grid), parse_rat(dc_target), dc_iters);
            Json facs = Json::array();
            for (const auto& f : dec.factors)
                facs.push_back(Json{{"slope", rat_to_json(f.slope)},
                                    {"rank", f.rank},
                                    {"module", module_to_json(f.module)}});
            Json out{{"schema_version", kSchemaVersion},
                     {"factors", facs},
                     {"residual_guarantee", rat_to_json(dec.residual_guarantee)}};
            Json basis = Json::array();
            for (unsigned i = 0; i < dec.basis.rows(); ++i) {
                Json row = Json::array();
                for (unsigned j = 0; j < dec.basis.cols(); ++j)
                    row.push_back(laurent_to_json(dec.basis.at(i, j)));
                basis.push_back(row);
            }
            out["basis"] = basis;
            if (!dc_out.empty()) {
                std::ofstream f(dc_out);
                f << out.dump(2) << "\n";
                std::cout << "wrote " << dc_out << "\n";
            } else
                emit(out, json_out);
        } else if (*exp_cmd) {
            DiffModule M = load_module(xp_module);
            size_t colon = xp_interval.find(':');
            if (colon == std::string::npos) throw input_error("--interval needs r1:r2");
            auto rec = recover_exponent(M, parse_rat(xp_interval.substr(0, colon)),
                                        parse_rat(xp_interval.substr(colon + 1)), xp_level,
                                        xp_budget);
            Json ents = Json::array(), sigs = Json::array();
            for (const auto& e : rec.tuple.entries) ents.push_back(rat_to_json(e));
            for (const auto& s : rec.signals) sigs.push_back(rat_to_json(s));
            emit(Json{{"schema_version", kSchemaVersion},
                      {"exponent_mod_p^m", ents},
                      {"precision", rec.tuple.precision},
                      {"signals", sigs},
                      {"series_cap", rec.series_cap},
                      {"determinant_identity_verified", rec.identity_verified}},
                 json_out);
        } else if (*push_cmd) {
            DiffModule M = load_module(ps_module);
            Json out = module_to_json(frobenius_pushforward(M));
            if (!ps_out.empty()) {
                std::ofstream f(ps_out);
                f << out.dump(2) << "\n";
                std::cout << "wrote " << ps_out << "\n";
            } else
                std::cout << out.dump(2) << "\n";
        } else if (*pull_cmd) {
            DiffModule M = load_module(pl_module);
            Laurent g = parse_laurent_inline(M.prime(), M.matrix().nparams(), pl_g);
            Annulus ann = M.annulus();
            if (!pl_ann.empty()) {
                size_t colon = pl_ann.find(':');
                ann.r_min = parse_rat(pl_ann.substr(0, colon));
                ann.r_max = parse_rat(pl_ann.substr(colon + 1));
            }
            DiffModule out = pullback(M, g, M.convention(), ann, parse_rat(pl_rprobe));
            Json j = module_to_json(out);
            if (!pl_out.empty()) {
                std::ofstream f(pl_out);
                f << j.dump(2) << "\n";
                std::cout << "wrote " << pl_out << "\n";
            } else
                std::cout << j.dump(2) << "\n";
        } else if (*hl_cmd) {
            Json pj = load_json_file(hl_poly);
            unsigned p = pj.at("p").get<unsigned>();
            LaurentPoly P;
            for (const auto& cj : pj.at("coeffs")) P.c.push_back(laurent_from_json(p, 0, cj));
            Laurent x0 = laurent_from_json(p, 0, pj.at("x0"));
            auto hr = hensel_lift(P, x0, parse_rat(hl_target), hl_iters);
            Json trace = Json::array();
            for (const auto& v : hr.residual_trace) trace.push_back(v.str());
            emit(Json{{"schema_version", kSchemaVersion},
                      {"root", laurent_to_json(hr.root)},
                      {"residual_valuation", hr.residual_valuation.str()},
                      {"residual_trace", trace},
                      {"r0", rat_to_json(hr.r0)},
                      {"iterations", hr.iterations}},
                 json_out);
        } else if (*fv_cmd) {
            DiffModule M = load_module(fv_module);
            Laurent phi = parse_laurent_inline(M.prime(), M.matrix().nparams(), fv_phi);
            Json mj = load_json_file(fv_matrix);
            const Json& mat = mj.contains("matrix") ? mj.at("matrix") : mj;
            LMat A(M.rank(), M.rank(), M.prime(), M.matrix().nparams());
            for (unsigned i = 0; i < M.rank(); ++i)
                for (unsigned j = 0; j < M.rank(); ++j)
                    A.at(i, j) = laurent_from_json(M.prime(), M.matrix().nparams(), mat[i][j]);
            std::string diag;
            bool ok = verify_frobenius_structure(M, phi, A, parse_rat(fv_tol), &diag);
            emit(Json{{"schema_version", kSchemaVersion}, {"verified", ok}, {"detail", diag}},
                 json_out);
            if (!ok) return 2;
        } else if (*scan_cmd) {
            FamilyModule F = family_from_json(load_json_file(sc_family));
            auto scan = semicontinuity_scan(F, parse_points(F.prime(), sc_points), sc_level,
                                            parse_grid(sc_grid));
            Json rows = Json::array();
            for (const auto& row : scan.rows) {
                Json r{{"point", row.point[0].str()}, {"solvable", row.solvable}};
                if (row.value)
                    r["value"] = rat_to_json(*row.value);
                else
                    r["note"] = row.note;
                rows.push_back(r);
            }
            Json out{{"schema_version", kSchemaVersion},
                     {"level", scan.level},
                     {"rows", rows},
                     {"gauss_attains_max", scan.gauss_attains_max},
                     {"generic_locus_consistent", scan.generic_locus_consistent},
                     {"distinct_values", scan.distinct_values}};
            if (scan.gauss_value) out["gauss_value"] = rat_to_json(*scan.gauss_value);
            emit(out, json_out);
        } else if (*fc_cmd) {
            FamilyModule F = family_from_json(load_json_file(fc_family));
            Laurent phi = parse_laurent_inline(F.prime(), 1, fc_phi);
            Json mj = load_json_file(fc_matrix);
            const Json& mat = mj.contains("matrix") ? mj.at("matrix") : mj;
            LMat A(F.rank(), F.rank(), F.prime(), 1);
            for (unsigned i = 0; i < F.rank(); ++i)
                for (unsigned j = 0; j < F.rank(); ++j)
                    A.at(i, j) = laurent_from_json(F.prime(), 1, mat[i][j]);
            auto cr = partial_frobenius_constancy(F, phi, A, parse_grid(fc_rx),
                                                  parse_grid(fc_tg), parse_rat(fc_tol));
            Json tb = Json::array();
            for (const auto& [rx, b] : cr.t_breaks) {
                Json bs = Json::array();
                for (const auto& x : b) bs.push_back(rat_to_json(x));
                tb.push_back(Json{{"r_x", rat_to_json(rx)}, {"breaks", bs}});
            }
            emit(Json{{"schema_version", kSchemaVersion},
                      {"frobenius_verified", cr.frobenius_verified},
                      {"constant", cr.constant},
                      {"convexity_consistent", cr.convexity_consistent},
                      {"t_breaks", tb},
                      {"note", cr.note}},
                 json_out);
            if (!cr.frobenius_verified) return 2;
        }
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const certification_error& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
