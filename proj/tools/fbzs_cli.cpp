// fbzs: command-line front end.  Exit status 0 on success, 1 on bad input or
// a failed validation suite, 2 when a numerical routine gives up.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbzs/io.hpp"

using namespace fbzs;

namespace {

struct RunConfig {
    std::string command;
    double A = 1;
    double m = 0;
    long N = 64;
    double tol = 1e-11;
    int grid = 2000;
    std::vector<double> x0_list{0.0};
    int nu_steps = 20;
    std::string output_path;
    std::string format = "json";
    std::string axis = "imag";
    std::string family = "all";
};

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(const RunConfig& c) {
    auto fail = [](const std::string& what, const std::string& fix) {
        throw usage_error(what + "\n  remedy: " + fix);
    };
    if (!(c.A > 0) || !std::isfinite(c.A)) fail("--A must be positive", "pass e.g. --A 2");
    if (!(c.m >= 0 && c.m < 1)) fail("--m must satisfy 0 <= m < 1", "pass e.g. --m 0.5");
    if (c.N < 2) fail("--N must be at least 2", "pass e.g. --N 64");
    if (!(c.tol > 0)) fail("--tol must be positive", "pass e.g. --tol 1e-11");
    if (c.grid < 4) fail("--grid must be at least 4", "pass e.g. --grid 400");
    if (c.nu_steps < 1) fail("--nu-steps must be at least 1", "pass e.g. --nu-steps 20");
    if (c.x0_list.empty()) fail("--x0 needs at least one base point", "pass e.g. --x0 0 0.2 0.4");
}

Meta meta_of(const RunConfig& c) {
    Meta m;
    m.A = c.A;
    m.m = c.m;
    m.N = c.N;
    m.tol = c.tol;
    return m;
}

void emit(const RunConfig& c, const json& doc) {
    const std::string text = c.format == "csv" ? to_csv(doc) : dump(doc);
    if (c.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.output_path, std::ios::binary);
    if (!f) throw usage_error("cannot open '" + c.output_path + "' for writing\n  remedy: check the directory exists");
    f << text;
}

void warn(const std::vector<std::string>& w) {
    for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

// Discriminant scan row: t is the coordinate along the chosen axis.
struct ScanRow {
    double t;
    MonodromyData d;
};

void to_json(json& j, const ScanRow& r) {
    j = {{"t", r.t}, {"z", r.d.z}, {"Delta", r.d.Delta}, {"c", r.d.c}, {"s", r.d.s}, {"est_error", r.d.est_error}};
}

struct SuiteResult {
    std::string suite;
    bool passed;
    double value, threshold;
    std::string detail;
};

void to_json(json& j, const SuiteResult& r) {
    j = {{"suite", r.suite}, {"passed", r.passed}, {"value", r.value}, {"threshold", r.threshold},
         {"detail", r.detail}};
}

ScanOptions scan_options(const RunConfig& c) {
    ScanOptions o;
    o.grid = c.grid;
    o.integ_tol = c.tol;
    return o;
}

SpectrumReport band_report(const RunConfig& c, const PotentialSpec& spec) {
    auto ode = band_edges_ode(spec, scan_options(c));
    warn(ode.warnings);
    auto edges = ode.edges;
    if (spec.integer_amplitude()) edges = merge_edges(edges, band_edges_tridiag(spec).edges, 1e-6);
    auto rep = classify(spec, edges, c.tol);
    warn(rep.warnings);
    return rep;
}

int cmd_elliptic(const RunConfig& c) {
    EllipticParameter m(c.m);
    const double period = 2 * complete_elliptic_K(m);
    std::vector<EllipticValues> rows;
    for (int k = 0; k <= c.grid; ++k) rows.push_back(jacobi_functions(period * k / c.grid, m));
    emit(c, make_document(meta_of(c), rows));
    return 0;
}

int cmd_discriminant(const RunConfig& c) {
    PotentialSpec spec(c.A, c.m);
    if (c.axis != "real" && c.axis != "imag")
        throw usage_error("--axis must be 'real' or 'imag'\n  remedy: pass --axis imag");
    const bool imag = c.axis == "imag";
    const double hi = imag ? c.A + 1 : 2 * c.A + 2;
    std::vector<ScanRow> rows;
    for (int k = 0; k <= c.grid; ++k) {
        const double t = hi * k / c.grid;
        rows.push_back({t, monodromy(spec, imag ? cplx(0, t) : cplx(t, 0), 0.0, c.tol)});
    }
    emit(c, make_document(meta_of(c), rows));
    return 0;
}

int cmd_bands(const RunConfig& c) {
    PotentialSpec spec(c.A, c.m);
    emit(c, make_document(meta_of(c), std::vector{band_report(c, spec)}));
    return 0;
}

int cmd_dirichlet(const RunConfig& c) {
    PotentialSpec spec(c.A, c.m);
    auto rep = band_report(c, spec);
    auto scan = dirichlet_scan(spec, c.x0_list, rep, 10 * c.tol, scan_options(c));
    warn(scan.warnings);
    emit(c, make_document(meta_of(c), scan.records));
    return 0;
}

int cmd_spectrum(const RunConfig& c) {
    PotentialSpec spec(c.A, c.m);
    std::vector<double> nus;
    for (int k = 0; k < c.nu_steps; ++k) nus.push_back(static_cast<double>(k) / c.nu_steps);
    auto sweep = nu_sweep(spec, nus, c.N, 1e-8);
    for (const auto& [nu, what] : sweep.failures) std::cerr << "warning: nu=" << nu << ": " << what << "\n";
    emit(c, make_document(meta_of(c), sweep.points));
    return 0;
}

int cmd_tridiag(const RunConfig& c) {
    std::vector<FamilyTag> tags;
    if (c.family == "all")
        tags.assign(std::begin(heun_families), std::end(heun_families));
    else
        tags.push_back(family_from_string(c.family));
    std::vector<EigenRecord> rows;
    for (FamilyTag t : tags) {
        RecurrenceFamily f = t == FamilyTag::Bnu ? RecurrenceFamily(t, c.A, c.m, 0.0) : RecurrenceFamily(t, c.A, c.m);
        auto ev = eigenvalues_truncated(f, c.N);
        for (std::size_t k = 0; k < ev.values.size(); ++k)
            rows.push_back({t, static_cast<long>(k), ev.values[k], ev.N_used});
    }
    emit(c, make_document(meta_of(c), rows));
    return 0;
}

int cmd_validate(const RunConfig& c) {
    PotentialSpec spec(c.A, c.m);
    std::vector<SuiteResult> out;
    auto add = [&](std::string name, double v, double thr, std::string detail = "") {
        out.push_back({std::move(name), v <= thr, v, thr, std::move(detail)});
    };

    const std::vector<cplx> samples{0.0,           0.7,          -1.3,        cplx(0, 0.9),  cplx(0, -1.7),
                                    cplx(0.5, 0.5), cplx(-1.2, 0.8), cplx(2.1, -0.4), cplx(0, 0.5 * c.A)};
    auto sym = symmetry_report(spec, samples, 1e-8, std::min(c.tol, 1e-12));
    add("symmetry", sym.max_residual, 1e-8, sym.ok() ? "" : sym.violations.front());

    if (spec.integer_amplitude()) {
        const int A = spec.integer_A();
        const Mat2c Phi = fundamental_solution(spec, 0.0, 0.0, spec.period(), std::min(c.tol, 1e-12));
        const double sign = A % 2 ? -1.0 : 1.0;
        add("zero_energy", (Phi - sign * Mat2c::Identity()).cwiseAbs().maxCoeff(), 1e-9);

        double im = 0, scale = 0;
        for (FamilyTag t : heun_families)
            for (cplx l : eigenvalues_truncated(RecurrenceFamily(t, c.A, c.m), c.N).values) {
                im = std::max(im, std::abs(l.imag()));
                scale = std::max(scale, std::abs(l));
            }
        add("tridiag_reality", im, 1e-8 * (1 + scale));

        auto ode = band_edges_ode(spec, scan_options(c));
        auto tri = band_edges_tridiag(spec);
        add("edge_agreement", hausdorff_distance(imaginary_edges(ode.edges), imaginary_edges(tri.edges)), 1e-6);
        auto rep = classify(spec, ode.edges, c.tol);
        const int expect = c.m > 0 ? 2 * A : 1;
        add("band_count", std::abs(rep.band_count - expect), 0,
            "bands " + std::to_string(rep.band_count) + ", genus " + std::to_string(rep.genus));
        double top = 0;
        for (const BandEdge& e : ode.edges)
            if (!e.closed) top = std::max(top, std::abs(e.z.imag()));
        if (c.m > 0) add("strip_inclusion", top - (c.A - 1e-6), 0, "max |Im z| " + std::to_string(top));

        if (c.m > 0 && A <= 2) {
            auto d = c0_diagnostic(spec);
            add("c0_agreement", std::abs(d.integral - d.series), 1e-8);
            add("c0_positive", -d.series, 0);
        }
    } else {
        auto rep = classify(spec, band_edges_ode(spec, scan_options(c)).edges, c.tol);
        add("segmentation", static_cast<double>(rep.warnings.size()), 0,
            "bands " + std::to_string(rep.band_count));
    }

    emit(c, make_document(meta_of(c), out));
    bool ok = true;
    for (const SuiteResult& r : out) {
        if (!r.passed) std::cerr << "FAIL " << r.suite << ": " << r.value << " > " << r.threshold << " " << r.detail << "\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--A", c.A, "amplitude A > 0")->envname("FBZS_A");
    sub->add_option("--m", c.m, "elliptic parameter, 0 <= m < 1")->envname("FBZS_M");
    sub->add_option("--N", c.N, "truncation size")->envname("FBZS_N");
    sub->add_option("--tol", c.tol, "integrator tolerance")->envname("FBZS_TOL");
    sub->add_option("--grid", c.grid, "sample count")->envname("FBZS_GRID");
    sub->add_option("--x0", c.x0_list, "base points in [0, 2K)")->envname("FBZS_X0")->delimiter(',');
    sub->add_option("--nu-steps", c.nu_steps, "Floquet exponent samples in [0, 1)")->envname("FBZS_NU_STEPS");
    sub->add_option("--output", c.output_path, "output file (stdout if omitted)")->envname("FBZS_OUTPUT");
    sub->add_option("--format", c.format, "json or csv")
        ->envname("FBZS_FORMAT")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--axis", c.axis, "real or imag")->envname("FBZS_AXIS");
    sub->add_option("--family", c.family, "Bnu, ToMinus, ToPlus, TinfMinus, TinfPlus or all")->envname("FBZS_FAMILY");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of the Zakharov-Shabat operator with potential A dn(x|m)", "fbzs"};
    app.require_subcommand(1);
    RunConfig cfg;
    const std::pair<const char*, const char*> cmds[] = {
        {"elliptic", "am, sn, cn, dn over one period"},
        {"discriminant", "Delta, c, s along the real or imaginary axis"},
        {"bands", "band edges and band/gap classification on the imaginary axis"},
        {"dirichlet", "Dirichlet eigenvalues for each base point"},
        {"spectrum", "Floquet-Hill eigenvalue cloud over the exponent sweep"},
        {"tridiag", "eigenvalues of the truncated recurrence matrices"},
        {"validate", "invariant suites; exit 1 if any fails"}};
    for (auto [name, help] : cmds) add_common(app.add_subcommand(name, help), cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        check(cfg);
        if (cfg.command == "elliptic") return cmd_elliptic(cfg);
        if (cfg.command == "discriminant") return cmd_discriminant(cfg);
        if (cfg.command == "bands") return cmd_bands(cfg);
        if (cfg.command == "dirichlet") return cmd_dirichlet(cfg);
        if (cfg.command == "spectrum") return cmd_spectrum(cfg);
        if (cfg.command == "tridiag") return cmd_tridiag(cfg);
        return cmd_validate(cfg);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {  // domain_error, invalid_argument
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
