// Batch front door: reads scenario configs, runs the curve -> spectrum ->
// floquet pipelines and the identity suites, and emits JSON/CSV/SVG artifacts
// with a hashed manifest.

#include "kdvspec/curve.hpp"
#include "kdvspec/elliptic.hpp"
#include "kdvspec/floquet.hpp"
#include "kdvspec/hierarchy.hpp"
#include "kdvspec/spectrum.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace kdvspec;

namespace {

struct RunConfig {
    std::string mode;
    json raw = json::object();
    fs::path out_dir = "out";
    std::vector<std::string> formats = {"json", "csv", "svg"};
    double tol_quad = 1e-10;
    double tol_trace = 1e-8;
    double tol_ode = 1e-10;
    double rmax_factor = 50.0;
    int basis_bound = 3;
    int grid_nx = 81, grid_ny = 41;
    int hierarchy_n = 2;
    bool latex = false;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

cplx get_cplx(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("complex values are [re, im] pairs");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::vector<cplx> branch_points_from(const json& cfg) {
    if (!cfg.contains("curve") || !cfg["curve"].contains("branch_points"))
        throw ConfigError("config needs curve.branch_points");
    std::vector<cplx> E;
    for (const auto& e : cfg["curve"]["branch_points"]) E.push_back(get_cplx(e));
    if (E.empty()) throw ConfigError("curve.branch_points must be non-empty");
    return E;
}

std::optional<CutPairingHint> pairing_from(const json& cfg) {
    if (!cfg.contains("curve") || !cfg["curve"].contains("pairing_hint")) return std::nullopt;
    const json& h = cfg["curve"]["pairing_hint"];
    CutPairingHint hint;
    for (const auto& pr : h.at("pairs")) hint.pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
    hint.ray_index = h.at("ray_index").get<int>();
    if (h.contains("ray_angle")) hint.ray_angle = h["ray_angle"].get<double>();
    return hint;
}

LameScenario scenario_from(const json& cfg) {
    if (!cfg.contains("lame")) throw ConfigError("config needs a lame section");
    const json& l = cfg["lame"];
    cplx om1 = get_cplx(l.at("omega1"));
    cplx om3 = l.contains("omega3") ? get_cplx(l["omega3"]) : cplx(0.0, 0.0);
    LameVariant variant = LameVariant::standard;
    if (l.contains("variant")) {
        std::string v = l["variant"].get<std::string>();
        if (v == "standard")
            variant = LameVariant::standard;
        else if (v == "conjugate_pair")
            variant = LameVariant::conjugate_pair;
        else
            throw ConfigError("lame.variant must be standard or conjugate_pair");
    }
    std::optional<cplx> shift;
    if (l.contains("shift")) shift = get_cplx(l["shift"]);
    return lame_scenario(om1, om3, variant, shift);
}

// FNV-1a 64-bit content hash; SVG artifacts are hashed with generated-
// timestamp comment lines stripped.
std::string content_hash(const std::string& data, bool strip_timestamp) {
    std::string body;
    if (strip_timestamp) {
        std::istringstream is(data);
        std::string line;
        while (std::getline(is, line)) {
            if (line.rfind("<!-- generated:", 0) == 0) continue;
            body += line;
            body += '\n';
        }
    } else {
        body = data;
    }
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : body) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& data) {
        fs::path p = dir_ / name;
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write artifact " + p.string());
        os << data;
        ordered_json a;
        a["name"] = name;
        a["bytes"] = data.size();
        bool svg = name.size() > 4 && name.substr(name.size() - 4) == ".svg";
        a["hash"] = content_hash(data, svg);
        manifest_.push_back(a);
    }

    void finish() {
        ordered_json m;
        m["artifacts"] = manifest_;
        std::ofstream os(dir_ / "manifest.json", std::ios::binary);
        os << m.dump(2) << "\n";
    }

private:
    fs::path dir_;
    ordered_json manifest_ = ordered_json::array();
};

bool wants(const RunConfig& rc, const std::string& fmt) {
    return std::find(rc.formats.begin(), rc.formats.end(), fmt) != rc.formats.end();
}

std::string hierarchy_text(int n) {
    std::ostringstream os;
    auto f = f_sequence(n + 1);
    for (int l = 0; l <= n + 1; ++l) os << "f_" << l << " = " << f[l].text() << "\n";
    for (int k = 0; k <= n; ++k) os << "s-KdV_" << k << " = " << skdv(k).text() << "\n";
    for (int k = 1; k <= n; ++k) os << "F_" << k << " = " << build_F(k).text() << "\n";
    for (int k = 0; k <= n; ++k) os << "H_" << k + 1 << " = " << build_H(k).text() << "\n";
    return os.str();
}

std::string hierarchy_latex(int n) {
    std::ostringstream os;
    auto f = f_sequence(n + 1);
    os << "\\begin{align*}\n";
    for (int l = 0; l <= n + 1; ++l) os << "f_{" << l << "} &= " << f[l].latex() << " \\\\\n";
    for (int k = 0; k <= n; ++k)
        os << "\\mathrm{s\\text{-}KdV}_{" << k << "} &= " << skdv(k).latex() << " \\\\\n";
    for (int k = 1; k <= n; ++k) os << "F_{" << k << "} &= " << build_F(k).latex() << " \\\\\n";
    for (int k = 0; k <= n; ++k)
        os << "H_{" << k + 1 << "} &= " << build_H(k).latex() << " \\\\\n";
    os << "\\end{align*}\n";
    return os.str();
}

struct Prepared {
    HyperellipticCurve curve;
    PeriodData periods;
};

Prepared prepare_curve(const std::vector<cplx>& E, const std::optional<CutPairingHint>& hint,
                       const RunConfig& rc) {
    auto c = HyperellipticCurve::create(E, hint);
    auto p = normalize_lambda(c, rc.tol_quad);
    b_periods_of_mean_g(c, p);
    symplectic_basis_search(c, p, rc.basis_bound);
    return {std::move(c), std::move(p)};
}

ordered_json curve_report(const HyperellipticCurve& c, const PeriodData& p) {
    ordered_json j = ordered_json::parse(c.to_json());
    j["periods"] = ordered_json::parse(period_data_to_json(p));
    return j;
}

void emit_spectrum(ArtifactWriter& w, const RunConfig& rc, const SpectrumResult& res,
                   const HyperellipticCurve& c, const PeriodData& p) {
    double step = 5e-3 * c.scale();
    if (wants(rc, "json")) w.write("arcs.json", spectrum_to_json(res, step));
    if (wants(rc, "csv")) w.write("arcs.csv", spectrum_to_csv(res, step));
    if (wants(rc, "svg")) w.write("spectrum.svg", spectrum_to_svg(res, c, p, true, step));
}

int run_hierarchy(const RunConfig& rc, ArtifactWriter& w) {
    if (rc.hierarchy_n < 0 || rc.hierarchy_n > 4)
        throw ConfigError("hierarchy order must be in 0..4");
    w.write("hierarchy.txt", hierarchy_text(rc.hierarchy_n));
    if (rc.latex || wants(rc, "tex")) w.write("hierarchy.tex", hierarchy_latex(rc.hierarchy_n));
    return 0;
}

int run_curve(const RunConfig& rc, ArtifactWriter& w) {
    auto pre = prepare_curve(branch_points_from(rc.raw), pairing_from(rc.raw), rc);
    w.write("curve.json", curve_report(pre.curve, pre.periods).dump(2) + "\n");
    return 0;
}

int run_spectrum(const RunConfig& rc, ArtifactWriter& w) {
    std::vector<cplx> E;
    std::optional<CutPairingHint> hint;
    if (rc.raw.contains("lame")) {
        auto s = scenario_from(rc.raw);
        E.assign(s.E.begin(), s.E.end());
    } else {
        E = branch_points_from(rc.raw);
        hint = pairing_from(rc.raw);
    }
    auto pre = prepare_curve(E, hint, rc);
    TraceOptions opt;
    opt.trace_tol = rc.tol_trace;
    opt.rmax_factor = rc.rmax_factor;
    auto res = trace_arcs(pre.curve, pre.periods, opt);
    w.write("curve.json", curve_report(pre.curve, pre.periods).dump(2) + "\n");
    emit_spectrum(w, rc, res, pre.curve, pre.periods);
    return 0;
}

int run_floquet(const RunConfig& rc, ArtifactWriter& w) {
    PeriodicPotential pp;
    if (rc.raw.contains("lame")) {
        auto s = scenario_from(rc.raw);
        auto V = [s](double x) { return s.V(x); };
        pp = PeriodicPotential::create(s.period, V);
    } else if (rc.raw.contains("floquet") && rc.raw["floquet"].contains("period")) {
        pp = PeriodicPotential::create(rc.raw["floquet"]["period"].get<double>(),
                                       [](double) { return cplx(0.0, 0.0); });
    } else {
        throw ConfigError("floquet mode needs a lame section or floquet.period");
    }
    cplx lo{-1.0, -1.0}, hi{10.0, 1.0};
    if (rc.raw.contains("window")) {
        lo = get_cplx(rc.raw["window"].at("lo"));
        hi = get_cplx(rc.raw["window"].at("hi"));
    }
    auto scan = spectrum_scan(pp, lo, hi, rc.grid_nx, rc.grid_ny, rc.tol_ode);
    if (wants(rc, "json")) w.write("floquet_scan.json", scan_to_json(scan));
    if (wants(rc, "csv")) w.write("floquet_scan.csv", scan_to_csv(scan));
    return 0;
}

int run_lame(const RunConfig& rc, ArtifactWriter& w) {
    auto s = scenario_from(rc.raw);
    ordered_json sj;
    sj["variant"] = s.variant == LameVariant::standard ? "standard" : "conjugate_pair";
    sj["omega1"] = ordered_json::array({s.lattice.omega1.real(), s.lattice.omega1.imag()});
    sj["omega3"] = ordered_json::array({s.lattice.omega3.real(), s.lattice.omega3.imag()});
    sj["shift"] = ordered_json::array({s.shift.real(), s.shift.imag()});
    sj["period"] = s.period;
    sj["branch_points"] = ordered_json::array();
    for (cplx e : s.E) sj["branch_points"].push_back(ordered_json::array({e.real(), e.imag()}));
    sj["lambda1_expected"] =
        ordered_json::array({s.lambda1_expected.real(), s.lambda1_expected.imag()});
    sj["mean_V_expected"] =
        ordered_json::array({s.mean_V_expected.real(), s.mean_V_expected.imag()});
    w.write("scenario.json", sj.dump(2) + "\n");

    std::vector<cplx> E(s.E.begin(), s.E.end());
    auto pre = prepare_curve(E, {}, rc);
    TraceOptions opt;
    opt.trace_tol = rc.tol_trace;
    opt.rmax_factor = rc.rmax_factor;
    auto res = trace_arcs(pre.curve, pre.periods, opt);
    w.write("curve.json", curve_report(pre.curve, pre.periods).dump(2) + "\n");
    emit_spectrum(w, rc, res, pre.curve, pre.periods);
    return 0;
}

int run_verify(const RunConfig& rc, ArtifactWriter& w) {
    ordered_json checks = ordered_json::array();
    auto add = [&](const std::string& name, bool pass, double residual, double tol) {
        ordered_json e;
        e["name"] = name;
        e["pass"] = pass;
        e["residual"] = residual;
        e["tolerance"] = tol;
        checks.push_back(e);
    };
    auto add_error = [&](const std::string& name, const std::string& what) {
        ordered_json e;
        e["name"] = name;
        e["pass"] = false;
        e["error"] = what;
        checks.push_back(e);
    };

    // Symbolic identity suite.
    for (int n = 1; n <= 2; ++n) {
        auto rep = verify_core_identities(n);
        add("symkdv.identities.n" + std::to_string(n), rep.ok(), rep.ok() ? 0.0 : 1.0, 0.0);
    }

    // Scenario: configured Lame lattice, lemniscatic by default.
    LameScenario s;
    try {
        s = rc.raw.contains("lame") ? scenario_from(rc.raw) : lame_scenario(1.0, cplx(0.0, 1.0));
    } catch (const std::exception& e) {
        add_error("scenario", e.what());
        ordered_json out;
        out["checks"] = checks;
        out["failures"] = 1;
        w.write("verify.json", out.dump(2) + "\n");
        return 0;
    }

    const auto& l = s.lattice;
    add("special.e_sum", std::abs(l.e1 + l.e2 + l.e3) < 1e-10, std::abs(l.e1 + l.e2 + l.e3),
        1e-10);
    cplx leg = l.eta1 * l.omega3 - l.eta3 * l.omega1 - cplx(0.0, 1.5707963267948966);
    add("special.legendre", std::abs(leg) < 1e-12, std::abs(leg), 1e-12);
    double wp_res = 0.0;
    for (double t : {0.31, 0.57, 0.83}) {
        cplx u = t * l.omega1 + (1 - t) * l.omega3 + cplx(0.1, 0.05);
        cplx pv = wp(l, u), dv = wp_prime(l, u);
        wp_res = std::max(wp_res,
                          std::abs(dv * dv - (4.0 * pv * pv * pv - l.g2 * pv - l.g3)));
    }
    add("special.wp_ode", wp_res < 1e-9, wp_res, 1e-9);

    try {
        std::vector<cplx> E(s.E.begin(), s.E.end());
        auto c = HyperellipticCurve::create(E, pairing_from(rc.raw));
        auto p = normalize_lambda(c, rc.tol_quad);
        b_periods_of_mean_g(c, p);
        symplectic_basis_search(c, p, rc.basis_bound);
        std::vector<cplx> q(p.poly);
        q.push_back(1.0);
        double norm_res = 0.0;
        for (int j = 1; j <= c.genus(); ++j)
            norm_res = std::max(norm_res, std::abs(a_period(c, q, j, rc.tol_quad)));
        add("curve.normalization_residual", norm_res < 1e-9, norm_res, 1e-9);
        add("curve.quadrature_converged", p.quad_converged, p.quad_error, rc.tol_quad);
        add("curve.basis_verified", p.basis_verified, p.max_re_b, 1e-6);
        double lam_res = std::abs(p.lambda[0] - s.lambda1_expected);
        add("curve.lambda_closed_form", lam_res < 1e-7, lam_res, 1e-7);
        double mv_res = std::abs(p.mean_V - s.mean_V_expected);
        add("curve.mean_V_closed_form", mv_res < 1e-7, mv_res, 1e-7);

        TraceOptions opt;
        opt.trace_tol = rc.tol_trace;
        opt.rmax_factor = rc.rmax_factor;
        auto res = trace_arcs(c, p, opt);
        add("spectrum.semi_infinite_unique", res.semi_infinite_count() == 1,
            res.semi_infinite_count(), 1);
        bool covered = true;
        double angle_err = 0.0;
        for (const auto& repm : res.endpoint_report) {
            covered = covered && repm.arc_count >= 1;
            for (double ma : repm.measured_angles) {
                double best = 1e9;
                for (double pa : repm.predicted_angles)
                    best = std::min(best, std::abs(std::remainder(ma - pa, 6.283185307179586)));
                angle_err = std::max(angle_err, best);
            }
        }
        add("spectrum.endpoint_coverage", covered, covered ? 0.0 : 1.0, 0.0);
        add("spectrum.endpoint_angles", angle_err < 1e-3, angle_err, 1e-3);
        double worst_res = 0.0;
        bool selfx = false;
        for (const auto& a : res.arcs) {
            for (double r : a.residuals) worst_res = std::max(worst_res, r);
            selfx = selfx || arc_self_intersects(a, 1e-6 * c.scale());
        }
        add("spectrum.vertex_residuals", worst_res <= rc.tol_trace, worst_res, rc.tol_trace);
        add("spectrum.no_self_intersections", !selfx, selfx ? 1.0 : 0.0, 0.0);
        std::vector<cplx> vs;
        for (int k = 0; k < 600; ++k) vs.push_back(s.V(s.period * k / 600.0));
        auto strip = validate_semistrip(res, vs);
        add("spectrum.semistrip", strip.ok(1e-6), strip.worst_violation, 1e-6);

        auto pp = PeriodicPotential::create(s.period, [s](double x) { return s.V(x); });
        std::vector<cplx> on, off;
        for (const auto& a : res.arcs) {
            for (size_t k = 0; k < a.vertices.size(); k += std::max<size_t>(1, a.vertices.size() / 20)) {
                if (on.size() < 40 && std::abs(a.vertices[k]) < 3.0 * c.scale())
                    on.push_back(a.vertices[k]);
            }
        }
        for (int k = 0; k < 8; ++k)
            off.push_back(cplx(-0.8 + 0.35 * k, 0.9 + 0.08 * k));
        auto sampler = [&s](double x, int kmax) { return s.sample(x, kmax); };
        auto links = check_green_discriminant_links(pp, c, p, on, off, sampler);
        add("floquet.log_phi_link", links.log_phi_residual <= 1e-6, links.log_phi_residual,
            1e-6);
        add("floquet.d_delta_link", links.d_delta_residual <= 1e-5, links.d_delta_residual,
            1e-5);
        add("floquet.green_link", links.green_residual <= 1e-7, links.green_residual, 1e-7);
        cplx det = monodromy(pp, cplx(0.37, 0.21), rc.tol_ode).det();
        add("floquet.monodromy_det", std::abs(det - 1.0) <= 1e-10, std::abs(det - 1.0), 1e-10);
    } catch (const std::exception& e) {
        add_error("curve-construction", e.what());
    }

    int failures = 0;
    for (const auto& e : checks)
        if (!e["pass"].get<bool>()) ++failures;
    ordered_json out;
    out["checks"] = checks;
    out["failures"] = failures;
    w.write("verify.json", out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of Schrodinger operators with quasi-periodic algebro-geometric "
                 "KdV potentials"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string config_path, out_dir, grid_spec;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", rc.formats, "output formats (json, csv, svg, tex)");
    app.add_option("--tol-quad", rc.tol_quad, "quadrature tolerance");
    app.add_option("--tol-trace", rc.tol_trace, "arc-trace tolerance");
    app.add_option("--tol-ode", rc.tol_ode, "ODE tolerance");
    app.add_option("--rmax", rc.rmax_factor, "semi-infinite cutoff factor");
    app.add_option("--grid", grid_spec, "scan grid, NxM");
    app.add_option("--basis-bound", rc.basis_bound, "symplectic search bound");
    app.add_option("--n", rc.hierarchy_n, "hierarchy order");
    app.add_flag("--latex", rc.latex, "emit LaTeX for hierarchy mode");

    auto* sub_hier = app.add_subcommand("hierarchy", "emit the symbolic KdV hierarchy");
    auto* sub_curve = app.add_subcommand("curve", "periods and normalization of a curve");
    auto* sub_spec = app.add_subcommand("spectrum", "trace the spectral arcs");
    auto* sub_floq = app.add_subcommand("floquet", "discriminant band scan");
    auto* sub_lame = app.add_subcommand("lame", "genus-one elliptic scenario pipeline");
    auto* sub_verify = app.add_subcommand("verify", "run the identity suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            rc.raw = json::parse(is);
        }
        if (sub_hier->parsed()) rc.mode = "hierarchy";
        if (sub_curve->parsed()) rc.mode = "curve";
        if (sub_spec->parsed()) rc.mode = "spectrum";
        if (sub_floq->parsed()) rc.mode = "floquet";
        if (sub_lame->parsed()) rc.mode = "lame";
        if (sub_verify->parsed()) rc.mode = "verify";
        if (rc.raw.contains("mode") && rc.raw["mode"].get<std::string>() != rc.mode)
            throw ConfigError("config mode disagrees with the subcommand");

        // Config-file values; command-line flags take precedence when given.
        if (rc.raw.contains("tolerances")) {
            const json& t = rc.raw["tolerances"];
            if (t.contains("quad") && !app.count("--tol-quad")) rc.tol_quad = t["quad"];
            if (t.contains("trace") && !app.count("--tol-trace")) rc.tol_trace = t["trace"];
            if (t.contains("ode") && !app.count("--tol-ode")) rc.tol_ode = t["ode"];
        }
        if (rc.raw.contains("rmax_factor") && !app.count("--rmax"))
            rc.rmax_factor = rc.raw["rmax_factor"];
        if (rc.raw.contains("basis_bound") && !app.count("--basis-bound"))
            rc.basis_bound = rc.raw["basis_bound"];
        if (rc.raw.contains("grid") && grid_spec.empty()) {
            rc.grid_nx = rc.raw["grid"].at(0).get<int>();
            rc.grid_ny = rc.raw["grid"].at(1).get<int>();
        }
        if (rc.raw.contains("hierarchy") && rc.raw["hierarchy"].contains("n") &&
            !app.count("--n"))
            rc.hierarchy_n = rc.raw["hierarchy"]["n"];
        if (rc.raw.contains("output")) {
            const json& o = rc.raw["output"];
            if (o.contains("dir") && out_dir.empty()) out_dir = o["dir"].get<std::string>();
            if (o.contains("formats") && !app.count("--format"))
                rc.formats = o["formats"].get<std::vector<std::string>>();
        }
        if (!grid_spec.empty()) {
            auto xpos = grid_spec.find('x');
            if (xpos == std::string::npos) throw ConfigError("--grid expects NxM");
            rc.grid_nx = std::stoi(grid_spec.substr(0, xpos));
            rc.grid_ny = std::stoi(grid_spec.substr(xpos + 1));
        }
        if (const char* env = std::getenv("KDVSPEC_OUT_DIR"); env && *env) out_dir = env;
        if (!out_dir.empty()) rc.out_dir = out_dir;

        if (!(rc.tol_quad > 0.0) || !(rc.tol_trace > 0.0) || !(rc.tol_ode > 0.0))
            throw ConfigError("tolerances must be positive");
        if (rc.grid_nx < 2 || rc.grid_ny < 2) throw ConfigError("grid sizes must be at least 2");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        ArtifactWriter w(rc.out_dir);
        int rcode = 0;
        try {
            if (rc.mode == "hierarchy")
                rcode = run_hierarchy(rc, w);
            else if (rc.mode == "curve")
                rcode = run_curve(rc, w);
            else if (rc.mode == "spectrum")
                rcode = run_spectrum(rc, w);
            else if (rc.mode == "floquet")
                rcode = run_floquet(rc, w);
            else if (rc.mode == "lame")
                rcode = run_lame(rc, w);
            else if (rc.mode == "verify")
                rcode = run_verify(rc, w);
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        }
        w.finish();
        return rcode;
    } catch (const std::exception& e) {
        // Computation failure: structured error report, exit 1.
        ordered_json err;
        err["error"] = e.what();
        err["mode"] = rc.mode;
        try {
            fs::create_directories(rc.out_dir);
            std::ofstream os(rc.out_dir / "error.json", std::ios::binary);
            os << err.dump(2) << "\n";
        } catch (...) {
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
