#pragma once

// Command-line front end. Every behavior lives in the library; this layer
// parses arguments, dispatches and writes files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "groups.hpp"
#include "planes.hpp"
#include "plot.hpp"
#include "verify.hpp"

namespace torus_planes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct PlaneOptions {
    std::string config;
    std::string plane = "classical";
    std::optional<std::string> f;
    std::optional<std::string> g;
    std::optional<double> tol;

    void add_to(CLI::App& app) {
        app.add_option("--config", config, "plane configuration file (key = value)");
        app.add_option("--plane", plane, "classical | half-classical | half:<f literal>");
        app.add_option("--f", f, "f literal: id | power:<p> | spline:<path>");
        app.add_option("--g", g, "g literal: id | power:<p> | spline:<path>");
        app.add_option("--tol", tol, "membership tolerance");
    }

    PlaneModel resolve() const {
        PlaneModel m = config.empty() ? plane_from_spec(plane, f, g) : plane_from_config_file(config);
        if (tol) m = m.with_tolerance(*tol);
        return m;
    }
};

inline std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items)
        for (const auto& part : detail::split(item, ','))
            if (!part.empty()) out.push_back(part);
    return out;
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("TORUS_PLANES_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw GeometryError(ErrorCode::ParseError, "TORUS_PLANES_SEED is not an integer");
        }
    }
    return 42;
}

struct VerifyOptions {
    PlaneOptions plane;
    std::vector<std::string> suites;
    std::optional<std::string> group;
    std::optional<double> d;
    int trials = 100;
    std::optional<std::uint64_t> seed;
    int grid = 64;
    std::string out = "reports";
    std::string base = "inf,inf";
    unsigned threads = 1;
};

/// Family for the fixed-configuration suite: taken from --group, with --d
/// overriding the exponent of phi / phi2 literals.
inline FixedFamily fixed_family_from(const std::optional<GroupLiteral>& lit, const std::optional<double>& d) {
    if (!lit) throw GeometryError(ErrorCode::ParseError, "fixed-configuration needs --group");
    const auto* g = std::get_if<GroupElement>(&*lit);
    if (!g) throw GeometryError(ErrorCode::ParseError, "so2l2 has no point-set action to scan");
    FixedFamily fam{g->family(), std::isnan(g->exponent()) ? 0.0 : g->exponent()};
    if (d) fam.d = *d;
    return fam;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<std::string> suites = split_list(o.suites);
    if (suites.empty()) {
        err << "error: no --suite given\n";
        return kExitConfig;
    }
    for (const auto& s : suites) {
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
            err << "error: unknown suite '" << s << "'\n";
            return kExitConfig;
        }
    }
    PlaneModel plane;
    std::optional<GroupLiteral> group;
    TrialConfig cfg;
    TorusPoint base;
    try {
        plane = o.plane.resolve();
        if (o.group) group = parse_group_literal(*o.group);
        base = parse_torus_point(o.base);
        cfg.seed = resolve_seed(o.seed);
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (o.trials < 1 || o.grid < 3) {
        err << "error: --trials must be >= 1 and --grid >= 3\n";
        return kExitConfig;
    }
    cfg.trials = o.trials;
    cfg.grid = o.grid;
    cfg.threads = o.threads;
    cfg.tolerance = o.plane.tol;

    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) {
        err << "error: cannot create output directory " << o.out << "\n";
        return kExitConfig;
    }

    json manifest = {{"config", o.plane.config},
                     {"subcommand", "verify"},
                     {"plane", plane.descriptor()},
                     {"suites", suites},
                     {"seed", cfg.seed},
                     {"trials", cfg.trials},
                     {"grid", cfg.grid},
                     {"output_directory", o.out}};
    if (o.group) manifest["group"] = *o.group;
    if (o.plane.tol) manifest["tolerance"] = *o.plane.tol;

    bool all_ok = true;
    for (const auto& suite : suites) {
        VerifyReport report;
        try {
            if (suite == "joining") report = verify_joining(plane, cfg);
            else if (suite == "touching") report = verify_touching(plane, cfg);
            else if (suite == "rigidity") report = verify_rigidity(plane, cfg);
            else if (suite == "derived-plane") report = verify_derived_plane(plane, base, cfg);
            else if (suite == "group-law") report = verify_group_law(cfg);
            else if (suite == "fixed-configuration") report = verify_fixed_configuration(fixed_family_from(group, o.d), cfg);
            else if (suite == "automorphism") {
                if (!group) throw GeometryError(ErrorCode::ParseError, "automorphism needs --group");
                const auto* g = std::get_if<GroupElement>(&*group);
                if (!g) throw GeometryError(ErrorCode::ParseError, "so2l2 has no point-set action");
                report = verify_automorphism(plane, *g, cfg);
            }
        } catch (const GeometryError& e) {
            err << "error: " << suite << ": " << e.what() << "\n";
            return kExitConfig;
        }
        const VerifyReport control = negative_control(suite, cfg);
        const bool control_ok = !control.pass;
        json j = report.to_json();
        j["manifest"] = manifest;
        j["negative_control"] = {{"plane", control.plane},
                                 {"group", control.group},
                                 {"pass", control.pass},
                                 {"counterexample_count", control.counterexample_count},
                                 {"failed_as_expected", control_ok}};
        const auto path = std::filesystem::path(o.out) / (suite + "-" + std::to_string(cfg.seed) + ".json");
        std::ofstream f(path);
        if (!f) {
            err << "error: cannot write " << path.string() << "\n";
            return kExitConfig;
        }
        f << j.dump(2) << "\n";
        out << suite << ": " << (report.pass ? "PASS" : "FAIL") << " (" << report.counterexample_count
            << " counterexamples, max residual " << report.max_residual << ")"
            << (control_ok ? "" : " [negative control unexpectedly passed]") << " -> " << path.string() << "\n";
        all_ok = all_ok && report.pass && control_ok;
    }
    return all_ok ? kExitOk : kExitFailure;
}

inline int cmd_join(const PlaneOptions& po, const std::vector<std::string>& points, std::ostream& out,
                    std::ostream& err) {
    if (points.size() != 3) {
        err << "error: join takes exactly three points\n";
        return kExitConfig;
    }
    try {
        const PlaneModel plane = po.resolve();
        const TorusPoint p = parse_torus_point(points[0]);
        const TorusPoint q = parse_torus_point(points[1]);
        const TorusPoint r = parse_torus_point(points[2]);
        const Circle c = join(plane, p, q, r);
        out << "plane: " << plane.descriptor() << "\n";
        out << "branch: " << to_string(c.tag) << "\n";
        out << "map: " << to_string(c.map) << "\n";
        out << "orientation: " << c.map.orientation() << "\n";
        out << "residuals: " << c.residual(p) << " " << c.residual(q) << " " << c.residual(r) << "\n";
        return kExitOk;
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::NoBranch || e.code() == ErrorCode::AmbiguousBranch) return kExitFailure;
        return kExitConfig;
    }
}

namespace detail {

inline std::pair<std::string, std::optional<std::string>> split_color(const std::string& spec) {
    const auto bar = spec.rfind('|');
    if (bar == std::string::npos) return {spec, std::nullopt};
    return {spec.substr(0, bar), spec.substr(bar + 1)};
}

inline std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> w;
    for (std::string t; in >> t;) w.push_back(t);
    return w;
}

}  // namespace detail

struct PlotOptions {
    PlaneOptions plane;
    std::vector<std::string> circles;      // "x,y x,y x,y[|color]"
    std::vector<std::string> circle_maps;  // "a,b,c,d[|color]"
    std::vector<std::string> classes;      // "plus:<x>[|color]" or "minus:<y>[|color]"
    std::vector<std::string> orbits;       // "<group>@<x,y>#<n>[|color]"
    std::string out;
};

inline std::vector<PlotObject> plot_objects(const PlotOptions& o) {
    const PlaneModel plane = o.plane.resolve();
    std::vector<PlotObject> objs;
    for (const auto& spec : o.circles) {
        const auto [body, color] = detail::split_color(spec);
        const auto w = detail::words(body);
        if (w.size() != 3) throw GeometryError(ErrorCode::ParseError, "circle needs three points: " + spec);
        const Circle c = join(plane, parse_torus_point(w[0]), parse_torus_point(w[1]), parse_torus_point(w[2]));
        objs.push_back(PlotCircle{c.graph, color.value_or("#1f77b4")});
    }
    for (const auto& spec : o.circle_maps) {
        const auto [body, color] = detail::split_color(spec);
        objs.push_back(PlotCircle{CircleHomeo{torus_planes::detail::parse_matrix(body)}, color.value_or("#1f77b4")});
    }
    for (const auto& spec : o.classes) {
        const auto [body, color] = detail::split_color(spec);
        const auto colon = body.find(':');
        const std::string kind = body.substr(0, colon);
        if (colon == std::string::npos || (kind != "plus" && kind != "minus"))
            throw GeometryError(ErrorCode::ParseError, "class must be plus:<x> or minus:<y>: " + spec);
        objs.push_back(PlotClass{{kind == "plus" ? ParallelKind::Plus : ParallelKind::Minus,
                                  ProjPoint::real(parse_real(body.substr(colon + 1)))},
                                 color.value_or("#7f7f7f")});
    }
    for (const auto& spec : o.orbits) {
        const auto [body, color] = detail::split_color(spec);
        const auto at = body.find('@');
        const auto hash = body.find('#');
        if (at == std::string::npos || hash == std::string::npos || hash < at)
            throw GeometryError(ErrorCode::ParseError, "orbit must be <group>@<x,y>#<n>: " + spec);
        const auto lit = parse_group_literal(body.substr(0, at));
        const auto* g = std::get_if<GroupElement>(&lit);
        if (!g) throw GeometryError(ErrorCode::ParseError, "so2l2 has no point-set action");
        const int n = static_cast<int>(parse_real(body.substr(hash + 1)));
        objs.push_back(PlotPoints{orbit(*g, parse_torus_point(body.substr(at + 1, hash - at - 1)), n),
                                  color.value_or("#d62728")});
    }
    return objs;
}

inline int cmd_plot(const PlotOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<PlotObject> objs;
    try {
        objs = plot_objects(o);
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::ofstream f(o.out);
    if (!f) {
        err << "error: cannot write " << o.out << "\n";
        return kExitConfig;
    }
    f << render_svg(objs);
    out << "wrote " << o.out << " (" << objs.size() << " objects)\n";
    return kExitOk;
}

/// Aggregates every report in `dir` into dir/index.json, ordered by (suite, seed).
inline int cmd_report_index(const std::string& dir, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        err << "error: cannot read directory " << dir << "\n";
        return kExitConfig;
    }
    std::vector<json> entries;
    fs::directory_iterator it(dir, ec);
    if (ec) {
        err << "error: cannot read directory " << dir << "\n";
        return kExitConfig;
    }
    for (const auto& e : it) {
        if (!e.is_regular_file() || e.path().extension() != ".json" || e.path().filename() == "index.json") continue;
        std::ifstream in(e.path());
        const json j = json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("suite") || !j.contains("pass")) continue;
        json entry = {{"file", e.path().filename().string()},
                      {"suite", j["suite"]},
                      {"seed", j.value("seed", std::uint64_t{0})},
                      {"plane", j.value("plane", std::string())},
                      {"pass", j["pass"]}};
        if (j.contains("negative_control")) entry["negative_control_ok"] = j["negative_control"].value("failed_as_expected", false);
        entries.push_back(std::move(entry));
    }
    std::sort(entries.begin(), entries.end(), [](const json& a, const json& b) {
        const auto ka = std::make_tuple(a["suite"].get<std::string>(), a["seed"].get<std::uint64_t>(), a["file"].get<std::string>());
        const auto kb = std::make_tuple(b["suite"].get<std::string>(), b["seed"].get<std::uint64_t>(), b["file"].get<std::string>());
        return ka < kb;
    });
    int passed = 0;
    json failing = json::array();
    for (const auto& e : entries) {
        const bool ok = e["pass"].get<bool>() && e.value("negative_control_ok", true);
        if (ok) {
            ++passed;
        } else if (std::find(failing.begin(), failing.end(), e["suite"]) == failing.end()) {
            failing.push_back(e["suite"]);
        }
    }
    const json index = {{"schema_version", kReportSchemaVersion},
                        {"entries", entries},
                        {"total", entries.size()},
                        {"pass_count", passed},
                        {"fail_count", static_cast<int>(entries.size()) - passed},
                        {"failing_suites", failing}};
    const auto path = fs::path(dir) / "index.json";
    std::ofstream f(path);
    if (!f) {
        err << "error: cannot write " << path.string() << "\n";
        return kExitConfig;
    }
    f << index.dump(2) << "\n";
    out << "indexed " << entries.size() << " reports (" << passed << " passing) -> " << path.string() << "\n";
    return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Toroidal circle planes: construction, automorphism actions and axiom verification"};
    app.require_subcommand(1);

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "run verification suites and write JSON reports");
    vo.plane.add_to(*verify);
    verify->add_option("--suite", vo.suites, "suite name(s), comma separated")->required();
    verify->add_option("--group", vo.group, "group element literal");
    verify->add_option("--d", vo.d, "exponent d override for phi / phi2 families");
    verify->add_option("--trials", vo.trials, "trials per suite");
    verify->add_option("--seed", vo.seed, "RNG seed (fallback: TORUS_PLANES_SEED, then 42)");
    verify->add_option("--grid", vo.grid, "grid size for sup-distance and scans");
    verify->add_option("--out", vo.out, "report directory");
    verify->add_option("--base", vo.base, "base point of the derived plane");
    verify->add_option("--threads", vo.threads, "worker threads for trials");

    PlaneOptions jo;
    std::vector<std::string> join_points;
    auto* joincmd = app.add_subcommand("join", "print the circle through three points");
    jo.add_to(*joincmd);
    joincmd->add_option("points", join_points, "three points x,y (inf allowed)")->expected(3);

    PlotOptions po;
    auto* plot = app.add_subcommand("plot", "render objects to SVG on the torus chart");
    po.plane.add_to(*plot);
    plot->add_option("--circle", po.circles, "circle through three points: \"x,y x,y x,y[|color]\"");
    plot->add_option("--circle-map", po.circle_maps, "Moebius graph: \"a,b,c,d[|color]\"");
    plot->add_option("--class", po.classes, "parallel class: plus:<x> or minus:<y>");
    plot->add_option("--orbit", po.orbits, "orbit: <group>@<x,y>#<iterations>");
    plot->add_option("--out", po.out, "output SVG path")->required();

    std::string index_dir;
    auto* index = app.add_subcommand("report-index", "aggregate reports into index.json");
    index->add_option("--out", index_dir, "report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (*verify) return cmd_verify(vo, out, err);
    if (*joincmd) return cmd_join(jo, join_points, out, err);
    if (*plot) return cmd_plot(po, out, err);
    if (*index) return cmd_report_index(index_dir, out, err);
    return kExitConfig;
}

/// Convenience overload for tests: args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"torus_planes"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace torus_planes::cli
