// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <torus_planes/cli.hpp>
#include <torus_planes/torus_planes.hpp>

using namespace torus_planes;

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();
const TorusPoint kInfInf{ProjPoint::infinity(), ProjPoint::infinity()};

struct Criterion {
    bool ok = true;
    std::vector<std::string> notes;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

int failures = 0;

void report(int n, const std::string& title, const Criterion& c, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", c.ok ? "PASS" : "FAIL", n, title.c_str(), detail.c_str());
    for (const auto& note : c.notes) std::printf("       - %s\n", note.c_str());
    if (!c.ok) ++failures;
    std::fflush(stdout);
}

TrialConfig config(int trials, std::uint64_t seed = 42) {
    TrialConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

PlaneModel power_plane(double p, const std::string& lit) {
    return PlaneModel::half_classical({CircleHomeo{PowerMap(p)}, lit});
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void joining() {
    Criterion c;
    std::string detail;
    const std::vector<PlaneModel> planes{PlaneModel::classical(), power_plane(1.0 / 3.0, "power:1/3"),
                                         power_plane(2.0, "power:2"), power_plane(3.0, "power:3")};
    for (const auto& plane : planes) {
        const auto t0 = std::chrono::steady_clock::now();
        const VerifyReport r = verify_joining(plane, config(1000));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double violations = r.statistics.value("branch_uniqueness_violations", 0.0);
        c.require(r.pass, plane.descriptor() + " has counterexamples");
        c.require(r.max_residual < 1e-9, plane.descriptor() + " residual " + fmt(r.max_residual));
        c.require(violations == 0.0, plane.descriptor() + " branch uniqueness violations");
        c.require(secs < 10.0, plane.descriptor() + " took " + fmt(secs) + " s");
        detail += plane.descriptor() + " max residual " + fmt(r.max_residual) + " in " + fmt(secs) + " s; ";
    }
    report(1, "joining, 4 planes x 1000 trials", c, detail);
}

void touching() {
    Criterion c;
    const auto classical = PlaneModel::classical();
    const VerifyReport r1 = verify_touching(classical, config(500));
    c.require(r1.pass, "classical touching has " + std::to_string(r1.counterexample_count) + " counterexamples");
    c.require(r1.statistics.value("tangency_brackets", 0.0) == 500.0, "classical: not exactly one bracket per trial");
    const auto half = power_plane(2.0, "power:2");
    const VerifyReport r2 = verify_touching(half, config(200));
    c.require(r2.pass, "half-classical touching has " + std::to_string(r2.counterexample_count) + " counterexamples");
    int reproduced = 0;
    for (const auto& cx : r2.counterexamples) reproduced += reverify_counterexample(half, r2, cx, 10) ? 1 : 0;
    c.require(reproduced == static_cast<int>(r2.counterexamples.size()), "stored counterexample does not re-verify at 10x");
    report(2, "touching, classical 500 + half-classical(power:2) 200", c,
           "counterexamples " + std::to_string(r1.counterexample_count) + " / " + std::to_string(r2.counterexample_count) +
               ", max residual " + fmt(std::max(r1.max_residual, r2.max_residual)));
}

void kernel_realization() {
    Criterion c;
    const auto half = power_plane(2.0, "power:2");
    const VerifyReport plus = verify_automorphism(half, GroupElement(KernelPlusPSL{MobiusMap(2, 1, 1, 1)}), config(200));
    const VerifyReport minus = verify_automorphism(half, GroupElement(KernelMinusPSL{MobiusMap(1, 1, 0, 1)}), config(200));
    c.require(plus.pass, "kernel-plus automorphism has counterexamples");
    c.require(!minus.pass && minus.counterexample_count >= 1, "kernel-minus x+1 was not rejected");
    report(3, "kernel-plus automorphisms of half-classical(power:2)", c,
           "kernel-plus counterexamples " + std::to_string(plus.counterexample_count) + ", kernel-minus(x+1) counterexamples " +
               std::to_string(minus.counterexample_count));
}

void diagonal_realization() {
    Criterion c;
    const auto plane = PlaneModel::classical();
    TrialRng mu_rng(42, 1u << 20);
    const GroupElement diag(DiagonalPSL{mu_rng.psl()});
    const VerifyReport aut = verify_automorphism(plane, diag, config(200));
    c.require(aut.pass, "diagonal automorphism suite failed");

    const CircleHomeo id = CircleHomeo::identity();
    double worst_sup = 0.0;
    int witnesses = 0;
    double worst_witness = 0.0;
    for (int t = 0; t < 100; ++t) {
        TrialRng rng(42, static_cast<std::uint64_t>(t));
        ProjPoint xs[3];
        for (auto& x : xs) x = rng.point();
        if (chordal_distance(xs[0], xs[1]) < kMinSeparation || chordal_distance(xs[0], xs[2]) < kMinSeparation ||
            chordal_distance(xs[1], xs[2]) < kMinSeparation) {
            --t;
            continue;
        }
        const Circle d = join(plane, {xs[0], xs[0]}, {xs[1], xs[1]}, {xs[2], xs[2]});
        worst_sup = std::max(worst_sup, homeo_sup_distance(d.graph, id, 64));

        // off-diagonal pair transitivity: (x, y) -> (u, v) by an orientation-preserving map
        const TorusPoint from = rng.torus_point(), to = rng.torus_point();
        if (chordal_distance(from.x, from.y) < kMinSeparation || chordal_distance(to.x, to.y) < kMinSeparation) continue;
        const MobiusMap mu = mobius_two_pairs(from.x, to.x, from.y, to.y).positive_member(rng.uniform(0.1, 10.0));
        const double miss = torus_distance(act(GroupElement(DiagonalPSL{mu}), from), to);
        worst_witness = std::max(worst_witness, miss);
        if (mu.det() > 0.0 && miss < 1e-9) ++witnesses;
    }
    c.require(worst_sup < 1e-9, "diagonal join differs from the identity circle by " + fmt(worst_sup));
    c.require(witnesses >= 100, "only " + std::to_string(witnesses) + " pair-transitivity witnesses");
    report(4, "diagonal action on the classical plane", c,
           "automorphism counterexamples " + std::to_string(aut.counterexample_count) + ", diagonal sup-distance " +
               fmt(worst_sup) + ", " + std::to_string(witnesses) + " witnesses (max miss " + fmt(worst_witness) + ")");
}

void fixed_configurations() {
    Criterion c;
    std::string detail;
    const std::vector<FixedFamily> fams{{GroupFamily::PhiTwoFixed, 0.0}, {GroupFamily::PhiTwoFixed, -1.0},
                                        {GroupFamily::PhiTwoFixed, -2.0}, {GroupFamily::PhiStd, kInfD},
                                        {GroupFamily::PhiStd, 0.0},       {GroupFamily::PhiStd, 1.0},
                                        {GroupFamily::PhiStd, 2.0}};
    for (const auto& fam : fams) {
        const VerifyReport r = verify_fixed_configuration(fam, config(100));
        const auto found = r.statistics["fixed_points"];
        c.require(r.pass, family_descriptor(fam) + " fixed configuration mismatch");
        detail += family_descriptor(fam) + " " + found.dump() + "; ";
    }
    report(5, "fixed configurations of phi2 / phi", c, detail);
}

void group_law() {
    Criterion c;
    const VerifyReport r = verify_group_law(config(20));
    c.require(r.pass, std::to_string(r.counterexample_count) + " group-law counterexamples");
    const VerifyReport broken = verify_group_law(config(20), swapped_compose, {{GroupFamily::PhiTwoFixed, -1.0}});
    c.require(!broken.pass, "swapped composition law was not rejected");
    report(6, "group law, 20 triples per family", c, "max pointwise residual " + fmt(r.max_residual));
}

void rigidity() {
    Criterion c;
    const VerifyReport r = verify_rigidity(PlaneModel::classical(), config(100));
    c.require(r.pass, "rigidity counterexamples: " + std::to_string(r.counterexample_count));
    const VerifyReport weak = verify_rigidity_two_points(PlaneModel::classical(), config(100));
    c.require(!weak.pass, "two fixed points already forced the identity");
    report(7, "rigidity on the classical plane, 100 triples", c,
           "counterexamples " + std::to_string(r.counterexample_count));
}

std::string without_runtime(const std::filesystem::path& p) {
    std::ifstream in(p);
    json j = json::parse(in);
    j.erase("runtime_ms");
    return j.dump(2);
}

void determinism() {
    Criterion c;
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "torus_planes_acceptance";
    fs::remove_all(root);
    struct Job {
        std::vector<std::string> args;
    };
    const std::vector<Job> jobs{
        {{"--plane", "half:power:2", "--suite", "joining,touching,derived-plane", "--trials", "100"}},
        {{"--plane", "half:power:2", "--suite", "automorphism", "--group", "kplus:psl:2,1,1,1", "--trials", "50"}},
        {{"--suite", "rigidity,group-law", "--trials", "20"}},
        {{"--suite", "fixed-configuration", "--group", "phi2:-1:2:3:1", "--trials", "10"}}};
    // both runs use the same manifest, output directory included; the first
    // run's reports are snapshotted before the second overwrites them
    const fs::path out = root / "reports";
    auto run_all = [&] {
        for (const auto& job : jobs) {
            std::vector<std::string> args{"verify"};
            args.insert(args.end(), job.args.begin(), job.args.end());
            args.insert(args.end(), {"--out", out.string()});
            std::ostringstream sink, err;
            const int code = cli::run(args, sink, err);
            c.require(code == 0, "verify exited with " + std::to_string(code) + ": " + err.str());
        }
    };
    run_all();
    std::map<std::string, std::string> first;
    for (const auto& e : fs::directory_iterator(out)) first[e.path().filename().string()] = without_runtime(e.path());
    run_all();
    int compared = 0;
    for (const auto& [name, text] : first) {
        c.require(text == without_runtime(out / name), name + " differs between runs");
        ++compared;
    }
    c.require(compared >= 7, "only " + std::to_string(compared) + " reports compared");
    report(8, "determinism, double run of every suite", c, std::to_string(compared) + " report pairs identical apart from runtime");
}

}  // namespace

int main() {
    const std::vector<void (*)()> criteria{joining, touching, kernel_realization, diagonal_realization,
                                           fixed_configurations, group_law, rigidity, determinism};
    for (auto fn : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion raised: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
