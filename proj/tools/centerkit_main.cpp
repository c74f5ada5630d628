#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "centerkit/errors.hpp"
#include "centerkit/fields.hpp"
#include "centerkit/flow.hpp"
#include "centerkit/jets.hpp"
#include "centerkit/linalg.hpp"
#include "centerkit/polar.hpp"
#include "centerkit/shift.hpp"
#include "json.hpp"

namespace {

using namespace centerkit;
using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InvalidSpec("cannot write file: " + path);
    out << content;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else {
        write_file(path, content);
        std::cout << "output: " << path << "\n";
    }
}

std::vector<double> parse_radii(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw InvalidSpec("bad radius: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw InvalidSpec("empty radius list");
    return out;
}

std::vector<double> dyadic_radii(double top, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(top * std::pow(2.0, -i));
    return out;
}

std::string field_type_name(const PlanarField& f) {
    if (!f.meta) return "custom";
    struct Namer {
        std::string operator()(const RotationSpec&) const { return "rotation"; }
        std::string operator()(const MonomialSpec&) const { return "monomial"; }
        std::string operator()(const QuadraticProductSpec&) const { return "quadratic_product"; }
        std::string operator()(const TakensFlatSpec&) const { return "takens_flat"; }
        std::string operator()(const TakensNonflatSpec&) const { return "takens_nonflat"; }
        std::string operator()(const PolynomialSpec&) const { return "polynomial"; }
    };
    return std::visit(Namer{}, *f.meta);
}

double report_tol() { return default_tol(); }

/* ---------------------------------------------------------------- classify */

std::string jet_case_label(const SquareMatrix& a) {
    const double scale = std::max(1.0, a.max_abs());
    const double tol = report_tol() * scale;
    if (a.max_abs() <= 1e-12) return "zero";
    const bool off_diag = std::abs(a(0, 0)) <= tol && std::abs(a(1, 1)) <= tol;
    if (off_diag && std::abs(a(0, 1) + a(1, 0)) <= tol && std::abs(a(1, 0)) > tol)
        return "rotation (b = " + format_g6(a(1, 0)) + ")";
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(a.trace()) <= tol && std::abs(det) <= tol * scale) return "nilpotent";
    return "outside the tangent-center catalog";
}

int cmd_classify(const std::string& spec_path, bool period_scan, double ray,
                 const std::string& radii_text, double max_time) {
    Timer timer;
    const PlanarField f = make_field(read_file(spec_path));
    std::cout << "command: classify\n";
    std::cout << "field: " << field_type_name(f) << " (" << spec_path << ")\n";

    const SquareMatrix a = linearize(f);
    std::cout << "linearization at the origin:\n";
    std::cout << "  [ " << format_g6(a(0, 0)) << "  " << format_g6(a(0, 1)) << " ]\n";
    std::cout << "  [ " << format_g6(a(1, 0)) << "  " << format_g6(a(1, 1)) << " ]\n";

    const auto eig = spectrum(a);
    std::cout << "spectrum: ";
    for (std::size_t i = 0; i < eig.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << format_g6(eig[i].real()) << (eig[i].imag() < 0 ? " - " : " + ")
                  << format_g6(std::abs(eig[i].imag())) << "i";
    }
    std::cout << "\n";
    std::cout << "linear part: " << jet_case_label(a) << "\n";

    int code = 0;
    if (period_scan) {
        IntegratorConfig cfg;
        cfg.max_time = max_time;
        /* deep enough that a quadratic correction to the period profile
           drops below the convergence cut inside the verdict window */
        const std::vector<double> radii =
            radii_text.empty() ? dyadic_radii(0.4, 10) : parse_radii(radii_text);
        const PeriodProfile prof = period_profile(f, ray, radii, cfg);
        int no_return = 0;
        for (const auto& s : prof.samples) {
            std::cout << "  r = " << format_g6(s.radius) << "  theta = "
                      << (s.converged ? format_g6(s.theta) : std::string("no return")) << "\n";
            if (!s.converged) ++no_return;
        }
        if (no_return > 0)
            std::cout << "no return on " << no_return << " of " << prof.samples.size()
                      << " radii\n";
        std::cout << "verdict: " << to_string(prof.verdict);
        if (prof.verdict == PeriodVerdict::ptc) std::cout << "  limit: " << format_g6(prof.limit);
        std::cout << "\n";
        switch (prof.verdict) {
            case PeriodVerdict::ptc: code = 0; break;
            case PeriodVerdict::divergent: code = 2; break;
            case PeriodVerdict::inconclusive: code = 3; break;
        }
    }
    std::cout << "wall_time: " << format_g6(timer.seconds()) << " s\n";
    return code;
}

/* ------------------------------------------------------------------ period */

int cmd_period(const std::string& spec_path, double ray, const std::string& radii_text,
               const std::string& out_path, bool with_integral, double max_time) {
    Timer timer;
    const PlanarField f = make_field(read_file(spec_path));
    IntegratorConfig cfg;
    cfg.max_time = max_time;
    const std::vector<double> radii =
        radii_text.empty() ? dyadic_radii(0.5, 8) : parse_radii(radii_text);

    std::cout << "command: period\n";
    std::cout << "field: " << field_type_name(f) << " (" << spec_path << ")\n";
    const PeriodProfile prof = period_profile(f, ray, radii, cfg);
    emit(out_path, prof.to_csv());
    std::cout << "verdict: " << to_string(prof.verdict);
    if (prof.verdict == PeriodVerdict::ptc) std::cout << "  limit: " << format_g6(prof.limit);
    std::cout << "\n";

    if (with_integral) {
        const bool polar_form =
            f.meta && (std::holds_alternative<RotationSpec>(*f.meta) ||
                       std::holds_alternative<TakensFlatSpec>(*f.meta));
        if (!polar_form)
            throw InvalidSpec("--integral needs a field in normalized polar form");
        const PolarField lift = lift_field(f);
        auto phibar = [&lift](double s, double rho) {
            return lift.phi_component(s, rho) - 1.0;
        };
        double worst = 0.0;
        for (const auto& s : prof.samples) {
            if (!s.converged) continue;
            const double v = period_integral(phibar, s.radius, ray);
            worst = std::max(worst, std::abs(v - s.theta));
            std::cout << "  r = " << format_g6(s.radius) << "  integral = " << format_g17(v)
                      << "\n";
        }
        std::cout << "max integral discrepancy: " << format_g6(worst) << "\n";
    }
    std::cout << "wall_time: " << format_g6(timer.seconds()) << " s\n";
    return 0;
}

/* -------------------------------------------------------------------- lift */

int cmd_lift(const std::string& spec_path, const std::string& grid_text,
             const std::string& out_path) {
    Timer timer;
    const PlanarField f = make_field(read_file(spec_path));
    const PolarField lift = lift_field(f);

    int n_angles = 32, n_radii = 8;
    if (!grid_text.empty()) {
        const auto x = grid_text.find('x');
        if (x == std::string::npos) throw InvalidSpec("grid format is AxR, e.g. 32x8");
        n_angles = std::stoi(grid_text.substr(0, x));
        n_radii = std::stoi(grid_text.substr(x + 1));
        if (n_angles < 1 || n_radii < 1) throw InvalidSpec("grid counts must be positive");
    }

    std::cout << "command: lift\n";
    std::cout << "field: " << field_type_name(f) << " (" << spec_path << ")\n";

    std::string csv = "phi,rho,b_phi,b_rho\n";
    for (int i = 0; i < n_radii; ++i) {
        const double rho = 0.5 * std::pow(2.0, -i);
        for (int j = 0; j < n_angles; ++j) {
            const double phi = kTwoPi * j / n_angles;
            csv += format_g17(phi);
            csv += ',';
            csv += format_g17(rho);
            csv += ',';
            csv += format_g17(lift.phi_component(phi, rho));
            csv += ',';
            csv += format_g17(lift.rho_component(phi, rho));
            csv += '\n';
        }
    }
    emit(out_path, csv);

    double boundary_defect = 0.0;
    for (int j = 0; j < 64; ++j) {
        const double phi = kTwoPi * j / 64.0;
        boundary_defect = std::max(boundary_defect, std::abs(lift.rho_component(phi, 1.0)));
    }
    if (boundary_defect > 1e-8)
        std::cout << "warning: field is not tangent to the boundary circle (radial rate up to "
                  << format_g6(boundary_defect) << " at rho = 1)\n";

    double c = 0.0;
    for (double phi : probe_angles()) c += lift.phi_component(phi, 0.0);
    c /= 32.0;
    ScalarField g_phi{[&lift, c](Vec2 z) {
                          const double rho = norm(z);
                          if (rho == 0.0) return 0.0;
                          return lift.phi_component(std::atan2(z.y, z.x), rho) - c;
                      },
                      nullptr};
    ScalarField g_rho{[&lift](Vec2 z) {
                          const double rho = norm(z);
                          if (rho == 0.0) return 0.0;
                          return lift.rho_component(std::atan2(z.y, z.x), rho);
                      },
                      nullptr};
    const std::vector<int> orders{1, 2, 3, 4};
    const auto flat_phi = flatness_order(g_phi, orders, probe_radii());
    const auto flat_rho = flatness_order(g_rho, orders, probe_radii());
    std::cout << "flatness of angular rate minus " << format_g6(c) << ":";
    for (std::size_t i = 0; i < orders.size(); ++i)
        std::cout << " order " << orders[i] << "=" << (flat_phi[i] ? "pass" : "fail");
    std::cout << "\nflatness of radial rate:";
    for (std::size_t i = 0; i < orders.size(); ++i)
        std::cout << " order " << orders[i] << "=" << (flat_rho[i] ? "pass" : "fail");
    std::cout << "\n";
    std::cout << "axis tangency defect: " << format_g6(axis_tangency_defect(lift)) << "\n";
    std::cout << "wall_time: " << format_g6(timer.seconds()) << " s\n";
    return 0;
}

/* ------------------------------------------------------------------- shift */

ScalarField parse_alpha(const json& spec) {
    if (spec.contains("const")) {
        const double c = spec["const"].get<double>();
        return {[c](Vec2) { return c; }, [](Vec2) { return Vec2{0.0, 0.0}; }};
    }
    if (spec.contains("poly")) {
        PolyXY p;
        for (const auto& term : spec["poly"]) {
            if (!term.is_array() || term.size() != 3)
                throw InvalidSpec("alpha poly terms must be [i, j, coeff]");
            p.terms.emplace_back(term[0].get<int>(), term[1].get<int>(),
                                 term[2].get<double>());
        }
        return {[p](Vec2 z) { return p.eval(z); }, [p](Vec2 z) { return p.gradient(z); }};
    }
    throw InvalidSpec("alpha spec needs \"const\" or \"poly\"");
}

bool rotation_symmetric(const PlanarField& f) {
    if (!f.meta) return false;
    if (std::holds_alternative<RotationSpec>(*f.meta)) return true;
    if (const auto* m = std::get_if<MonomialSpec>(&*f.meta)) return m->p == 1 && m->q == 1;
    if (const auto* t = std::get_if<TakensFlatSpec>(&*f.meta))
        return t->xbar.zero() && t->ybar.zero();
    return false;
}

std::function<Vec2(Vec2)> build_map(const json& spec, const PlanarField& f,
                                    std::optional<ScalarField>* alpha_out) {
    if (!spec.is_object() || !spec.contains("type"))
        throw InvalidSpec("map spec needs a \"type\"");
    const std::string type = spec["type"].get<std::string>();
    if (type == "flow-by") {
        if (!spec.contains("alpha")) throw InvalidSpec("flow-by needs \"alpha\"");
        const ScalarField alpha = parse_alpha(spec["alpha"]);
        if (alpha_out) *alpha_out = alpha;
        return [f, alpha](Vec2 z) { return shift_apply(f, alpha, z); };
    }
    if (type == "rotation-by") {
        if (!rotation_symmetric(f))
            throw InvalidSpec("rotation-by is only valid for rotation-symmetric fields");
        const double a = spec.value("angle", 0.0);
        const double c = std::cos(a), s = std::sin(a);
        return [c, s](Vec2 z) { return Vec2{c * z.x - s * z.y, s * z.x + c * z.y}; };
    }
    if (type == "composition") {
        if (!spec.contains("maps") || !spec["maps"].is_array() || spec["maps"].empty())
            throw InvalidSpec("composition needs a non-empty \"maps\" array");
        std::vector<std::function<Vec2(Vec2)>> parts;
        for (const auto& m : spec["maps"]) parts.push_back(build_map(m, f, nullptr));
        return [parts](Vec2 z) {
            for (const auto& m : parts) z = m(z);
            return z;
        };
    }
    throw InvalidSpec("unknown map type: " + type);
}

int cmd_shift(const std::string& spec_path, const std::string& map_path, int n_samples,
              const std::string& out_path, unsigned seed) {
    Timer timer;
    const PlanarField f = make_field(read_file(spec_path));
    json map_spec;
    try {
        map_spec = json::parse(read_file(map_path));
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad map JSON: ") + e.what());
    }
    std::optional<ScalarField> alpha;
    const auto h = build_map(map_spec, f, &alpha);

    std::cout << "command: shift\n";
    std::cout << "field: " << field_type_name(f) << " (" << spec_path << ")\n";

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> radius(0.05, 0.9);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<Vec2> samples{{0.0, 0.0}};
    for (int i = 1; i < n_samples; ++i) samples.push_back(polar_point(angle(rng), radius(rng)));

    const ShiftGrid grid = recover_shift(f, h, samples);

    std::string csv = "x,y,sigma,residual\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        csv += format_g17(grid.points[i].x);
        csv += ',';
        csv += format_g17(grid.points[i].y);
        csv += ',';
        csv += format_g17(grid.sigma[i]);
        csv += ',';
        csv += format_g17(grid.residuals[i]);
        csv += '\n';
    }
    emit(out_path, csv);
    std::cout << "max residual: " << format_g6(grid.max_residual) << "\n";

    if (alpha) {
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            const Vec2 z = grid.points[i];
            if (norm(z) == 0.0) continue;
            const double theta = period(f, z);
            const double diff = alpha->eval(z) - grid.sigma[i];
            const long n = std::lround(diff / theta);
            if (n != 0 && std::abs(diff - n * theta) <= 1e-4 * std::max(1.0, theta))
                std::cout << "note: recovered time differs from alpha by " << n
                          << " * theta (kernel element)\n";
            break;
        }
    }
    std::cout << "wall_time: " << format_g6(timer.seconds()) << " s\n";
    return 0;
}

/* -------------------------------------------------------------------- jets */

std::string poly_to_text(const HomogeneousPoly& p) {
    std::string out;
    for (int i = p.degree(); i >= 0; --i) {
        if (p.coeff(i) == 0) continue;
        if (!out.empty()) out += " + ";
        out += to_rational_string(p.coeff(i));
        const int j = p.degree() - i;
        if (i > 0) out += " x^" + std::to_string(i);
        if (j > 0) out += " y^" + std::to_string(j);
    }
    return out.empty() ? "0" : out;
}

int cmd_jets(const std::string& table_path) {
    Timer timer;
    const TaylorTable table = parse_taylor_table(read_file(table_path));
    std::cout << "command: jets\n";
    std::cout << "table: max degree " << table.max_degree << " (" << table_path << ")\n";
    const RadializeOutcome outcome = radialize_series(table);
    int code = 0;
    if (outcome.radial) {
        std::cout << "radial series coefficients:";
        if (outcome.coefficients.empty()) std::cout << " (none)";
        for (const auto& a : outcome.coefficients) std::cout << " " << to_rational_string(a);
        std::cout << "\n";
    } else {
        std::cout << "fails at degree " << outcome.failing_degree << "\n";
        std::cout << "defect: " << poly_to_text(*outcome.failing_defect) << "\n";
        code = 2;
    }
    std::cout << "wall_time: " << format_g6(timer.seconds()) << " s\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis toolkit for planar fields with a topological center"};
    app.require_subcommand(1);

    std::string spec_path, map_path, table_path, radii_text, out_path, grid_text;
    double ray = 0.0;
    double max_time = 1e4;
    bool period_scan = false, with_integral = false;
    int n_samples = 24;
    unsigned seed = 42;

    auto* classify = app.add_subcommand("classify", "Linearization, spectrum, and period verdict");
    classify->add_option("spec", spec_path, "field spec JSON path")->required();
    classify->add_flag("--period-scan", period_scan, "run a period scan along a ray");
    classify->add_option("--ray", ray, "ray angle (default 0)");
    classify->add_option("--radii", radii_text, "comma-separated decreasing radii");
    classify->add_option("--max-time", max_time, "integration time budget per radius");

    auto* period_cmd = app.add_subcommand("period", "Periods along a ray as CSV");
    period_cmd->add_option("spec", spec_path, "field spec JSON path")->required();
    period_cmd->add_option("--ray", ray, "ray angle (default 0)");
    period_cmd->add_option("--radii", radii_text, "comma-separated decreasing radii");
    period_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    period_cmd->add_flag("--integral", with_integral, "cross-check against the period integral");
    period_cmd->add_option("--max-time", max_time, "integration time budget per radius");

    auto* lift = app.add_subcommand("lift", "Polar lift of the field on a grid");
    lift->add_option("spec", spec_path, "field spec JSON path")->required();
    lift->add_option("--grid", grid_text, "grid (angles x radii), e.g. 32x8");
    lift->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* shift = app.add_subcommand("shift", "Recover the time function of an orbit map");
    shift->add_option("spec", spec_path, "field spec JSON path")->required();
    shift->add_option("map", map_path, "map spec JSON path")->required();
    shift->add_option("--samples", n_samples, "number of sample points");
    shift->add_option("--out", out_path, "CSV output path (default stdout)");
    shift->add_option("--seed", seed, "sample seed (default 42)");

    auto* jets = app.add_subcommand("jets", "Radialize a Taylor table");
    jets->add_option("table", table_path, "taylor table JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (classify->parsed())
            return cmd_classify(spec_path, period_scan, ray, radii_text, max_time);
        if (period_cmd->parsed())
            return cmd_period(spec_path, ray, radii_text, out_path, with_integral, max_time);
        if (lift->parsed()) return cmd_lift(spec_path, grid_text, out_path);
        if (shift->parsed()) return cmd_shift(spec_path, map_path, n_samples, out_path, seed);
        if (jets->parsed()) return cmd_jets(table_path);
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NotOrbitPreserving& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NotPTC& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
