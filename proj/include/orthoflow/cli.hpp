#pragma once

// Command-line surface: evaluate actions, factor group elements, inspect
// flows, run verification suites and emit the integer tables. Reports are
// a single JSON document on stdout; for a fixed seed and flags the body is
// byte-identical across runs. Exit codes: 0 success, 1 verification
// failure, 2 usage error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orthoflow/verify.hpp"

namespace orthoflow::cli {

using json = nlohmann::ordered_json;

struct RunConfig {
    int p = 3;
    int q = 3;
    std::string flowKind = "basicJ1";
    int n = 1;
    double a = 0.0;
    int samples = 100;
    std::uint64_t seed = 42;
    Tolerances tol;
};

namespace detail {

inline circleflow::FlowKind parse_kind(const std::string& s) {
    if (s == "basicJ1") return circleflow::FlowKind::BasicJ1;
    if (s == "basicJ1J2") return circleflow::FlowKind::BasicJ1J2;
    throw BadParameters("unknown flow kind: " + s);
}

inline std::vector<double> parse_numbers(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    for (char ch : csv) {
        if (ch == ',') {
            out.push_back(std::stod(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

inline json matrix_json(const numkit::Mat& m) {
    json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["entries"] = m.a;  // row-major
    return j;
}

inline json config_json(const RunConfig& cfg) {
    json j;
    j["p"] = cfg.p;
    j["q"] = cfg.q;
    j["flow"] = cfg.flowKind;
    j["n"] = cfg.n;
    j["a"] = cfg.a;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    return j;
}

inline int emit(const json& report, bool pass) {
    std::cout << report.dump(2) << "\n";
    return pass ? 0 : 1;
}

inline sopq::GroupElement element_from_coeffs(const sopq::Signature& sig,
                                              const std::vector<double>& coeffs,
                                              const Tolerances& tol) {
    return sopq::certify(numkit::matrix_exp(sopq::from_coefficients(sig, coeffs).mat), sig, tol);
}

}  // namespace detail

inline int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"orthoflow: constructed indefinite-orthogonal group actions at desk scale"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("ORTHOFLOW_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
    bool seedFromEnv = std::getenv("ORTHOFLOW_SEED") != nullptr;

    auto addCommon = [&](CLI::App* sub) {
        sub->add_option("--p", cfg.p, "negative-signature dimension (>= 3)");
        sub->add_option("--q", cfg.q, "positive-signature dimension (>= 3)");
        sub->add_option("--n", cfg.n, "flow family index n >= 1");
        sub->add_option("--a", cfg.a, "flow family deformation, |a| < 1");
        sub->add_option("--samples", cfg.samples, "sample count for randomized checks");
        if (!seedFromEnv) sub->add_option("--seed", cfg.seed, "RNG seed");
    };

    // act
    std::string actSpace = "product";
    std::string gCoeffs, pointCsv;
    CLI::App* act = app.add_subcommand("act", "apply exp(coefficients) to a point");
    addCommon(act);
    act->add_option("--space", actSpace, "product or sphere")
        ->check(CLI::IsMember({"product", "sphere"}));
    act->add_option("--g", gCoeffs, "algebra coefficients over the ordered basis")->required();
    act->add_option("--point", pointCsv, "point coordinates (v ++ w, or ambient)")->required();

    // decompose
    double decomposeF = 0.0;
    std::string decomposeG;
    CLI::App* dec = app.add_subcommand("decompose", "factor g = k m(theta) u against a slice datum");
    addCommon(dec);
    dec->add_option("--f", decomposeF, "companion value of the slice datum")->required();
    dec->add_option("--g", decomposeG, "algebra coefficients over the ordered basis")->required();

    // flow
    std::string makeKind = "basicJ1";
    bool wantInvariants = false, wantLift = false;
    int conjN = 0;
    double conjA = 0.0;
    bool haveConj = false;
    CLI::App* flowCmd = app.add_subcommand("flow", "build and inspect a circle flow");
    addCommon(flowCmd);
    flowCmd->add_option("--make", makeKind, "basicJ1 or basicJ1J2")
        ->check(CLI::IsMember({"basicJ1", "basicJ1J2"}));
    flowCmd->add_flag("--invariants", wantInvariants, "report Jacobians and the PV invariant");
    flowCmd->add_flag("--lift", wantLift, "project to RP1 and lift through the double cover");
    auto* cn = flowCmd->add_option("--conjugate-n", conjN, "second flow n for a conjugacy run");
    flowCmd->add_option("--conjugate-a", conjA, "second flow a for a conjugacy run")->needs(cn);

    // verify
    std::string suiteName = "all";
    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    addCommon(ver);
    ver->add_option("--suite", suiteName, "suite name or 'all'");

    // tables
    bool wantParabolic = false, wantTable1 = false;
    std::string rangeSpec = "3:9";
    int pLo = 3, pHi = 12;
    CLI::App* tab = app.add_subcommand("tables", "emit the integer dimension tables");
    tab->add_flag("--parabolic", wantParabolic, "parabolic dimension table");
    tab->add_flag("--table1", wantTable1, "compact orbit table");
    tab->add_option("--range", rangeSpec, "q:p range for the parabolic table, e.g. 3:9");
    tab->add_option("--p-lo", pLo, "lower p for generic orbit rows");
    tab->add_option("--p-hi", pHi, "upper p for generic orbit rows");

    // orbit
    std::string orbitAction = "basic";
    double orbitPhi = kPi / 2;
    CLI::App* orb = app.add_subcommand("orbit", "classify the orbit of a slice point");
    addCommon(orb);
    orb->add_option("--action", orbitAction, "basic, uchida or bundle")
        ->check(CLI::IsMember({"basic", "uchida", "bundle"}));
    orb->add_option("--phi", orbitPhi, "slice angle of the point");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    haveConj = cn->count() > 0;

    try {
        sopq::Signature sig(cfg.p, cfg.q);
        json report;

        if (*act) {
            cfg.flowKind = actSpace == "product" ? "basicJ1" : "basicJ1J2";
            report["command"] = "act";
            report["config"] = detail::config_json(cfg);
            sopq::GroupElement g =
                detail::element_from_coeffs(sig, detail::parse_numbers(gCoeffs), cfg.tol);
            std::vector<double> coords = detail::parse_numbers(pointCsv);
            json result;
            if (actSpace == "product") {
                if (static_cast<int>(coords.size()) != sig.p + 1 + sig.q)
                    throw BadParameters("act: point needs p+1+q coordinates");
                circleflow::FlowFunctionPair pair = circleflow::make_pair(
                    circleflow::make_flow(circleflow::FlowKind::BasicJ1, cfg.n, cfg.a));
                engine::ProductSpherePoint x;
                x.v.assign(coords.begin(), coords.begin() + sig.p + 1);
                x.w.assign(coords.begin() + sig.p + 1, coords.end());
                engine::ProductSpherePoint moved = engine::act_product(g, x, pair, cfg.tol);
                result["v"] = moved.v;
                result["w"] = moved.w;
            } else {
                if (static_cast<int>(coords.size()) != sig.n())
                    throw BadParameters("act: point needs p+q coordinates");
                circleflow::FlowFunctionPair pair = circleflow::make_pair(
                    circleflow::make_flow(circleflow::FlowKind::BasicJ1J2, cfg.n, cfg.a));
                engine::SpherePoint moved =
                    engine::act_sphere(g, engine::SpherePoint{coords}, pair, cfg.tol);
                result["y"] = moved.y;
            }
            report["checks"] = json::array();
            report["result"] = result;
            report["summary"] = {{"checks", 0}, {"failed", 0}, {"pass", true}};
            return detail::emit(report, true);
        }

        if (*dec) {
            report["command"] = "decompose";
            report["config"] = detail::config_json(cfg);
            sopq::GroupElement g =
                detail::element_from_coeffs(sig, detail::parse_numbers(decomposeG), cfg.tol);
            engine::DecompositionResult d =
                engine::decompose(g, circleflow::ProjectivePoint::make(decomposeF, 1.0), cfg.tol);
            json result;
            result["theta"] = d.theta;
            result["k"] = detail::matrix_json(d.k.mat);
            result["u"] = detail::matrix_json(d.u.mat);
            result["residual"] = d.residual;
            result["margin"] = d.margin;
            result["transported"] = {d.transported.a, d.transported.b};
            json diag = json::array();
            for (const auto& b : d.diagnostics)
                diag.push_back({{"theta", b.theta},
                                {"sign", b.sign},
                                {"residual", b.residual},
                                {"component_ok", b.component_ok},
                                {"accepted", b.accepted}});
            result["branches"] = diag;
            report["checks"] = json::array();
            report["result"] = result;
            report["summary"] = {{"checks", 0}, {"failed", 0}, {"pass", true}};
            return detail::emit(report, true);
        }

        if (*flowCmd) {
            cfg.flowKind = makeKind;
            report["command"] = "flow";
            report["config"] = detail::config_json(cfg);
            circleflow::CircleFlow flow =
                circleflow::make_flow(detail::parse_kind(makeKind), cfg.n, cfg.a);
            json result;
            json checksArr = json::array();
            json fps = json::array();
            for (const auto& fp : flow.validation.fixed_points)
                fps.push_back({{"angle", fp.angle}, {"jacobian", fp.jacobian}});
            result["fixed_points"] = fps;
            int failed = 0, checks = 0;
            if (wantInvariants) {
                result["pv_invariant"] = circleflow::pv_global_invariant(flow);
                result["zero_residual"] = flow.validation.zero_residual;
                result["symmetry_residual"] = flow.validation.symmetry_residual;
            }
            if (haveConj || conjN > 0) {
                circleflow::CircleFlow other =
                    circleflow::make_flow(detail::parse_kind(makeKind), conjN, conjA);
                circleflow::ConjugacyResult c = circleflow::conjugacy_map(flow, other, cfg.tol);
                json cj;
                cj["success"] = c.success;
                cj["defect"] = c.defect;
                cj["derivative_gap"] = c.derivative_gap;
                cj["certificate"] = c.certificate;
                result["conjugacy"] = cj;
            }
            if (wantLift) {
                if (flow.kind != circleflow::FlowKind::BasicJ1J2)
                    throw BadParameters("flow --lift: basicJ1J2 input required");
                circleflow::RP1Flow down = circleflow::project_to_rp1(flow);
                circleflow::LiftedFlow lift = circleflow::lift_double_cover(down);
                json lj;
                lj["fixed_points"] = lift.fixed_points;
                double defect = circleflow::covering_defect(lift, down, cfg.tol);
                lj["covering_defect"] = defect;
                circleflow::ConjugacyResult round = circleflow::conjugacy_map_geo(
                    lift.geometry(), circleflow::FlowGeometry::from(flow), cfg.tol);
                lj["round_trip_conjugate"] = round.success;
                result["lift"] = lj;
                checksArr.push_back({{"name", "lift: covering defect"},
                                     {"value", defect},
                                     {"threshold", 1e-8},
                                     {"pass", defect <= 1e-8}});
                checksArr.push_back({{"name", "lift: round trip conjugate"},
                                     {"value", round.success ? 0.0 : 1.0},
                                     {"threshold", 0.5},
                                     {"pass", round.success}});
                checks += 2;
                if (defect > 1e-8) ++failed;
                if (!round.success) ++failed;
            }
            report["checks"] = checksArr;
            report["result"] = result;
            report["summary"] = {{"checks", checks}, {"failed", failed}, {"pass", failed == 0}};
            return detail::emit(report, failed == 0);
        }

        if (*ver) {
            report["command"] = "verify";
            report["config"] = detail::config_json(cfg);
            verify::VerifyConfig vc;
            vc.p = cfg.p;
            vc.q = cfg.q;
            vc.kind = detail::parse_kind(cfg.flowKind);
            vc.n = cfg.n;
            vc.a = cfg.a;
            vc.samples = cfg.samples;
            vc.seed = cfg.seed;
            vc.tol = cfg.tol;
            std::vector<std::string> names =
                suiteName == "all" ? verify::suite_names() : std::vector<std::string>{suiteName};
            json checks = json::array();
            int total = 0, failed = 0;
            for (const std::string& name : names) {
                verify::SuiteReport rep = verify::run_suite(name, vc);
                for (const auto& c : rep.checks) {
                    json e;
                    e["name"] = rep.suite + ": " + c.name;
                    e["value"] = c.value;
                    e["threshold"] = c.threshold;
                    e["pass"] = c.pass;
                    checks.push_back(e);
                    ++total;
                    if (!c.pass) ++failed;
                }
            }
            report["checks"] = checks;
            report["summary"] = {{"checks", total}, {"failed", failed}, {"pass", failed == 0}};
            return detail::emit(report, failed == 0);
        }

        if (*tab) {
            report["command"] = "tables";
            json result;
            if (!wantParabolic && !wantTable1) wantParabolic = wantTable1 = true;
            if (wantParabolic) {
                auto colon = rangeSpec.find(':');
                int qLo = std::stoi(rangeSpec.substr(0, colon));
                int pMax = std::stoi(rangeSpec.substr(colon + 1));
                json rows = json::array();
                for (int p = qLo; p <= pMax; ++p)
                    for (int q = qLo; q <= p; ++q)
                        for (auto kind :
                             {ledger::ParabolicKind::NullLine, ledger::ParabolicKind::MaxIsotropic}) {
                            ledger::ParabolicDims d = ledger::parabolic_dims(kind, p, q);
                            rows.push_back(
                                {{"kind",
                                  kind == ledger::ParabolicKind::NullLine ? "null-line"
                                                                          : "max-isotropic"},
                                 {"p", d.p},
                                 {"q", d.q},
                                 {"dim_m", d.dimM},
                                 {"dim_n_plus_theta", d.dimNplusTheta},
                                 {"dim_n_theta", d.dimNTheta},
                                 {"dim_p_theta", d.dimPTheta},
                                 {"codim", d.codim}});
                        }
                result["parabolic"] = rows;
            }
            if (wantTable1) {
                json rows = json::array();
                for (const auto& row : ledger::table1_rows(pLo, pHi))
                    rows.push_back({{"p", row.p},
                                    {"subgroup", row.subgroup},
                                    {"dim_orbit", row.dimOrbit},
                                    {"dim_orbit_printed", row.dimOrbitPrinted},
                                    {"dim_bound", row.dimBound},
                                    {"q_lo", row.qLo},
                                    {"q_hi", row.qHi},
                                    {"bottom_part", row.bottomPart}});
                result["orbit_table"] = rows;
            }
            report["checks"] = json::array();
            report["result"] = result;
            report["summary"] = {{"checks", 0}, {"failed", 0}, {"pass", true}};
            return detail::emit(report, true);
        }

        if (*orb) {
            report["command"] = "orbit";
            report["config"] = detail::config_json(cfg);
            orbitlab::ActionHandle handle;
            orbitlab::Point x;
            if (orbitAction == "basic") {
                circleflow::FlowFunctionPair pair = circleflow::make_pair(
                    circleflow::make_flow(circleflow::FlowKind::BasicJ1, cfg.n, cfg.a));
                handle = orbitlab::product_action_handle(sig, pair, cfg.tol);
                x = orbitlab::pack(engine::slice_point(sig, orbitPhi));
            } else if (orbitAction == "uchida") {
                circleflow::FlowFunctionPair pair = circleflow::make_pair(
                    circleflow::make_flow(circleflow::FlowKind::BasicJ1J2, cfg.n, cfg.a));
                handle = orbitlab::sphere_action_handle(sig, pair, cfg.tol);
                x = engine::sphere_slice_vector(sig, orbitPhi);
            } else {
                circleflow::CircleFlow flow =
                    circleflow::make_flow(circleflow::FlowKind::BasicJ1, cfg.n, cfg.a);
                handle = orbitlab::bundle_action_handle(sig, flow, cfg.tol);
                x = orbitlab::pack(sopq::identity(sig), orbitPhi);
            }
            orbitlab::OrbitReport rep = orbitlab::classify_orbit(handle, x, cfg.tol);
            auto typeName = [](orbitlab::OrbitType t) -> std::string {
                switch (t) {
                    case orbitlab::OrbitType::Open: return "open";
                    case orbitlab::OrbitType::ClosedPnull: return "closed-parabolic";
                    case orbitlab::OrbitType::Nullcone: return "nullcone";
                    case orbitlab::OrbitType::StabSOp1q: return "stabilizer-so(p-1,q)";
                    case orbitlab::OrbitType::StabSOpq1: return "stabilizer-so(p,q-1)";
                    default: return "unknown";
                }
            };
            json result;
            result["dimension"] = rep.dimension;
            result["isotropy_dim"] = rep.isotropyDim;
            result["orbit_type"] = typeName(rep.orbitType);
            result["stabilizer_label"] = typeName(rep.stabilizerLabel);
            if (rep.fTilde)
                result["f_tilde"] = {rep.fTilde->a, rep.fTilde->b};
            result["stabilized_form_value"] = rep.stabilizedFormValue;
            report["checks"] = json::array();
            report["result"] = result;
            report["summary"] = {{"checks", 0}, {"failed", 0}, {"pass", true}};
            return detail::emit(report, true);
        }
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int dispatch(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

}  // namespace orthoflow::cli
