// Command-line front end for the quasi-infinitely divisible distribution
// toolkit: lattice analysis, series construction, triplet algebra, moment and
// density criteria.  All inputs and outputs are JSON; some reports also
// render as plain tables, CSV, or a single SVG line chart.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qid/qid.hpp"

namespace {

using qid::json;

int exit_code_for(qid::ErrKind kind) {
    switch (kind) {
        case qid::ErrKind::Inconclusive:
        case qid::ErrKind::GridTooCoarse:
        case qid::ErrKind::QuadratureFailure:
        case qid::ErrKind::ImaginaryLeak:
            return 3;  // retry with a finer grid or tolerance
        case qid::ErrKind::HypothesisFails:
        case qid::ErrKind::NotIntegrable:
            return 4;  // the requested quantity does not exist for this input
        default:
            return 2;  // validation
    }
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    qid::require(in.good(), qid::ErrKind::BadInput, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        qid::fail(qid::ErrKind::BadInput, "invalid JSON in '" + path + "': " + e.what());
    }
}

std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            qid::require(pos == item.size(), qid::ErrKind::BadInput,
                         "trailing characters in number '" + item + "'");
        } catch (const qid::Error&) {
            throw;
        } catch (...) {
            qid::fail(qid::ErrKind::BadInput, "cannot parse number '" + item + "'");
        }
    }
    qid::require(!out.empty(), qid::ErrKind::BadInput, "empty number list");
    return out;
}

Eigen::VectorXd parse_vector(const std::string& s) {
    const std::vector<double> v = parse_numbers(s);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd parse_matrix(const std::string& s) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_numbers(row));
    qid::require(!rows.empty(), qid::ErrKind::BadInput, "empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        qid::require(rows[i].size() == rows[0].size(), qid::ErrKind::BadInput,
                     "ragged matrix rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

// "a:b:n" log-spaced grid from a to b inclusive with n points
std::vector<double> parse_log_grid(const std::string& s) {
    std::vector<double> parts = parse_numbers(s, ':');
    qid::require(parts.size() == 3, qid::ErrKind::BadInput, "grid spec must be a:b:n");
    const double a = parts[0], b = parts[1];
    const int n = static_cast<int>(parts[2]);
    qid::require(a > 0.0 && b > 0.0 && n >= 2, qid::ErrKind::BadInput,
                 "grid endpoints must be positive and n >= 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = a * std::pow(b / a, double(i) / (n - 1));
    return g;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_vec(const Eigen::VectorXd& v) {
    std::string s = "[";
    for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string triplet_table(const qid::CharTriplet& t) {
    std::ostringstream os;
    os << "mode:  " << qid::to_string(t.mode()) << "\n";
    os << "gamma: " << fmt_vec(t.gamma()) << "\n";
    os << "A:\n";
    for (int i = 0; i < t.dim(); ++i) os << "  " << fmt_vec(t.A().row(i)) << "\n";
    const auto& atoms = t.nu().atomic().atoms();
    os << "nu: " << atoms.size() << " atoms";
    if (t.nu().has_stable())
        os << " + stable(alpha=" << fmt(t.nu().stable_tail()->alpha)
           << ", C=" << fmt(t.nu().stable_tail()->C) << ")";
    if (t.nu().tail_bound() > 0.0) os << ", tail bound " << fmt(t.nu().tail_bound());
    os << "\n";
    for (const auto& [p, w] : atoms)
        os << "  " << fmt_vec(qid::point_view(p)) << " -> " << fmt(w) << "\n";
    return os.str();
}

// Minimal log-log SVG chart: one polyline per series, log10 ticks.
std::string svg_loglog(const std::string& title, const std::string& xlabel,
                       const std::vector<double>& x,
                       const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const double W = 720, H = 480, L = 70, R = 20, T = 40, B = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) continue;
        for (const auto& s : series) {
            const double y = s.second[i];
            if (!(y > 0.0) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, std::log10(x[i]));
            xmax = std::max(xmax, std::log10(x[i]));
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-9) xmax = xmin + 1;
    if (ymax - ymin < 1e-9) ymax = ymin + 1;
    const auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
    const auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
       << " font-size=\"16\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double lx = xmin + (xmax - xmin) * i / 4.0;
        const double ly = ymin + (ymax - ymin) * i / 4.0;
        char tb[40];
        std::snprintf(tb, sizeof tb, "1e%.2g", lx);
        os << "<text x=\"" << px(lx) << "\" y=\"" << H - B + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tb
           << "</text>\n";
        std::snprintf(tb, sizeof tb, "1e%.2g", ly);
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(ly) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tb
           << "</text>\n";
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
       << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::ostringstream pts;
        bool pen_down = false;
        std::string path;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double y = series[s].second[i];
            if (!(x[i] > 0.0) || !(y > 0.0) || !std::isfinite(y)) {
                pen_down = false;
                continue;
            }
            char seg[64];
            std::snprintf(seg, sizeof seg, "%c%.2f %.2f ", pen_down ? 'L' : 'M',
                          px(std::log10(x[i])), py(std::log10(y)));
            path += seg;
            pen_down = true;
        }
        os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << colors[s % 4]
           << "\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 18 + 16 * s
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
           << colors[s % 4] << "\">" << series[s].first << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

struct MomentsOutcome {
    json report;
    int exit_code = 0;
};

MomentsOutcome run_moments(const qid::CharTriplet& t, const std::optional<Eigen::VectorXd>& alpha) {
    MomentsOutcome out;
    out.report = json::object();
    const auto record = [&](const char* key, auto&& compute) {
        try {
            out.report[key] = compute();
        } catch (const qid::Error& e) {
            out.report[key] = json{{"error", qid::to_string(e.kind())}, {"message", e.what()}};
            out.exit_code = std::max(out.exit_code, exit_code_for(e.kind()));
        }
    };
    record("mean", [&] { return qid::detail::vec_to_json(qid::mean(t)); });
    record("covariance", [&] { return qid::detail::mat_to_json(qid::covariance(t)); });
    if (alpha) {
        record("exp_moment", [&] { return qid::exp_moment_to_json(qid::exp_moment(t, *alpha)); });
    } else {
        out.report["exp_moment"] = nullptr;
    }
    out.report["tail_bound"] = t.nu().tail_bound();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-infinitely divisible distribution toolkit"};
    app.require_subcommand(1);

    std::string in_path, in_path2, format = "json";
    std::string a_str, alpha_str, z_str, matrix_str, offset_str, rgrid_str, tgrid_str;
    std::string cone_path, pmf_path, target_path, eps_str, ramps_str, labels_str;
    std::vector<std::string> seq_paths;
    std::size_t grid_n = 0;
    double mass_tol = 1e-10, tol = 1e-10, lambda = 1.0, beta = 1.0;

    const auto add_format = [&](CLI::App* cmd, const std::string& choices) {
        cmd->add_option("--format", format, "output format (" + choices + ")")
            ->default_val("json");
    };

    auto* analyze = app.add_subcommand("analyze", "certify and extract the triplet of a lattice pmf");
    analyze->add_option("pmf", in_path, "pmf JSON file")->required();
    analyze->add_option("--grid", grid_n, "torus grid size per axis (0 = automatic)");
    analyze->add_option("--mass-tol", mass_tol, "atom retention threshold")->default_val(1e-10);
    add_format(analyze, "json|table");

    auto* cup = app.add_subcommand("cuppens", "series construction for a law with a dominant atom");
    cup->add_option("sigma", in_path, "remainder measure JSON file")->required();
    cup->add_option("--lambda", lambda, "dominant atom mass, in (1/2, 1]")->required();
    cup->add_option("--a", a_str, "dominant atom location, comma separated (default 0)");
    cup->add_option("--tol", tol, "series truncation tolerance")->default_val(1e-10);
    add_format(cup, "json|table");

    auto* conv = app.add_subcommand("convolve", "convolution of two triplets");
    conv->add_option("first", in_path, "triplet JSON file")->required();
    conv->add_option("second", in_path2, "triplet JSON file")->required();
    add_format(conv, "json|table");

    auto* aff = app.add_subcommand("affine", "affine image M X + b of a triplet");
    aff->add_option("triplet", in_path, "triplet JSON file")->required();
    aff->add_option("--matrix", matrix_str, "rows separated by ';', entries by ','")->required();
    aff->add_option("--offset", offset_str, "offset vector, comma separated")->required();
    add_format(aff, "json|table");

    auto* mom = app.add_subcommand("moments", "mean, covariance, exponential moment");
    mom->add_option("triplet", in_path, "triplet JSON file")->required();
    mom->add_option("--alpha", alpha_str, "direction for the exponential moment");
    add_format(mom, "json|table");

    auto* dens = app.add_subcommand("density-check", "smoothness criterion on a radius grid");
    dens->add_option("triplet", in_path, "triplet JSON file")->required();
    dens->add_option("--r-grid", rgrid_str, "log grid a:b:n (default 1:1e-6:20)");
    add_format(dens, "json|table|svg");

    auto* orey = app.add_subcommand("orey", "power-scaled eigenvalue diagnostic");
    orey->add_option("triplet", in_path, "triplet JSON file")->required();
    orey->add_option("--beta", beta, "scaling exponent in (0, 2)")->required();
    orey->add_option("--r-grid", rgrid_str, "log grid a:b:n (default 1:1e-6:20)");
    add_format(orey, "json|table|svg");

    auto* sup = app.add_subcommand("support-check", "cone support criterion");
    sup->add_option("triplet", in_path, "triplet JSON file")->required();
    sup->add_option("--cone", cone_path, "cone JSON file (half-space normals)")->required();
    sup->add_option("--pmf", pmf_path, "reference pmf for the drift-in-support check");
    add_format(sup, "json|table");

    auto* probe = app.add_subcommand("probe", "gaussian form scaling probe of an exponent");
    probe->add_option("triplet", in_path, "triplet JSON file");
    bool use_polya = false;
    probe->add_flag("--polya", use_polya, "probe the exponent 1 - e^{|t|} instead of a file");
    probe->add_option("--z", z_str, "probe direction (default first basis vector)");
    probe->add_option("--t-grid", tgrid_str, "log grid a:b:n (default 0.1:1000:40)");
    add_format(probe, "json|table");

    auto* cvg = app.add_subcommand("converge", "finite-index convergence diagnostics");
    cvg->add_option("sequence", seq_paths, "triplet JSON files, in sequence order")->required();
    cvg->add_option("--target", target_path, "target triplet JSON file")->required();
    cvg->add_option("--eps", eps_str, "small-jump radii, comma separated");
    cvg->add_option("--ramps", ramps_str, "ramp functions a:b, comma separated");
    cvg->add_option("--labels", labels_str, "row labels, comma separated");
    add_format(cvg, "json|table|csv");

    auto* proj = app.add_subcommand("project-id", "one-dimensional projection divisibility check");
    proj->add_option("triplet", in_path, "triplet JSON file")->required();
    proj->add_option("--a", a_str, "integer projection vector, comma separated")->required();
    proj->add_option("--mass-tol", mass_tol, "negativity tolerance")->default_val(1e-10);
    add_format(proj, "json|table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*analyze) {
            const qid::LatticePMF pmf = qid::pmf_from_json(read_json(in_path));
            const qid::AnalyzeResult res = qid::analyze_pmf(pmf, grid_n, mass_tol);
            if (format == "table") {
                std::cout << "certified: yes (N=" << res.certificate.N
                          << ", min modulus=" << fmt(res.certificate.min_modulus)
                          << ", threshold=" << fmt(res.certificate.threshold) << ")\n";
                std::cout << "alias residual: " << fmt(res.extraction.report.alias_residual)
                          << (res.extraction.report.alias_warning ? "  (warning)" : "") << "\n";
                std::cout << triplet_table(res.extraction.triplet);
            } else {
                emit(qid::analyze_to_json(res));
            }
            return 0;
        }
        if (*cup) {
            const qid::AtomicSignedMeasure sigma = qid::atomic_from_json(read_json(in_path));
            Eigen::VectorXd a = a_str.empty() ? Eigen::VectorXd::Zero(sigma.dim()).eval()
                                              : parse_vector(a_str);
            const qid::CuppensResult res = qid::cuppens_triplet(lambda, a, sigma, tol);
            if (format == "table") {
                std::cout << "K=" << res.K << "  tail bound=" << fmt(res.tail_bound)
                          << "  mass residual=" << fmt(res.mass_residual) << "\n";
                std::cout << triplet_table(res.triplet);
            } else {
                emit(qid::cuppens_to_json(res));
            }
            return 0;
        }
        if (*conv) {
            const qid::CharTriplet a = qid::triplet_from_json(read_json(in_path));
            const qid::CharTriplet b = qid::triplet_from_json(read_json(in_path2));
            const qid::CharTriplet c = qid::convolve(a, b);
            if (format == "table")
                std::cout << triplet_table(c);
            else
                emit(qid::triplet_to_json(c));
            return 0;
        }
        if (*aff) {
            const qid::CharTriplet t = qid::triplet_from_json(read_json(in_path));
            const Eigen::MatrixXd M = parse_matrix(matrix_str);
            const Eigen::VectorXd b = parse_vector(offset_str);
            const qid::CharTriplet u = qid::affine_image(t, M, b);
            if (format == "table")
                std::cout << triplet_table(u);
            else
                emit(qid::triplet_to_json(u));
            return 0;
        }
        if (*mom) {
            const qid::CharTriplet t = qid::triplet_from_json(read_json(in_path));
            std::optional<Eigen::VectorXd> alpha;
            if (!alpha_str.empty()) alpha = parse_vector(alpha_str);
            const MomentsOutcome out = run_moments(t, alpha);
            if (format == "table") {
                std::cout << out.report.dump(2) << "\n";
            } else {
                emit(out.report);
            }
            return out.exit_code;
        }
        if (*dens) {
            const qid::CharTriplet t = qid::triplet_from_json(read_json(in_path));
            std::vector<double> grid =
                rgrid_str.empty() ? qid::default_r_grid() : parse_log_grid(rgrid_str);
            const qid::DensityReport rep = qid::check_kallenberg(t, std::move(grid));
            if (format == "svg") {
                std::cout << svg_loglog("smoothness index", "r", rep.r,
                                        {{"index", rep.index}});
            } else if (format == "table") {
                std::cout << "verdict: " << qid::to_string(rep.verdict) << "\n";
                std::cout << "r  G+  G-  g+  g-  nu-(|x|>r)  index\n";
                for (std::size_t i = 0; i < rep.r.size(); ++i)
                    std::cout << fmt(rep.r[i]) << "  " << fmt(rep.G_plus[i]) << "  "
                              << fmt(rep.G_minus[i]) << "  " << fmt(rep.g_plus[i]) << "  "
                              << fmt(rep.g_minus[i]) << "  " << fmt(rep.nu_minus_tail[i])
                              << "  " << fmt(rep.index[i]) << "\n";
            } else {
                emit(qid::density_report_to_json(rep));
            }
            return 0;
        }
        if (*orey) {
            const qid::CharTriplet t = qid::triplet_from_json(read_json(in_path));
            std::vector<double> grid =
                rgrid_str.empty() ? qid::default_r_grid() : parse_log_grid(rgrid_str);
            const qid::OreyReport rep = qid::check_orey(t, beta, std::move(grid));
            if (format == "svg") {
                std::cout << svg_loglog("power-scaled eigenvalues", "r", rep.r,
                                        {{"r^-b G+", rep.a_plus}, {"r^-b G-", rep.a_minus}});
            } else if (format == "table") {
                std::cout << "holds on grid: " << (rep.holds_on_grid ? "yes" : "no") << "\n";
                std::cout << "r  r^-b G+  r^-b G-\n";
                for (std::size_t i = 0; i < rep.r.size(); ++i)
                    std::cout << fmt(rep.r[i]) << "  " << fmt(rep.a_plus[i]) << "  "
                              << fmt(rep.a_minus[i]) << "\n";
            } else {
                emit(qid::orey_report_to_json(rep));
            }
            return 0;
        }
        if (*sup) {
            const qid::CharTriplet t = qid::triplet_from_json(read_json(in_path));
            const qid::Cone K = qid::cone_from_json(read_json(cone_path));
            const qid::ConeCheck chk = qid::check_cone_conditions(t, K);
            json rep = qid::cone_check_to_json(chk);
            if (!pmf_path.empty()) {
                const qid::LatticePMF ref = qid::pmf_from_json(read_json(pmf_path));
                rep["drift_in_support"] = qid::drift_in_support_check(t, ref);
            }
            if (format == "table") {
                std::cout << "conclusion: " << qid::to_string(chk.conclusion) << "\n"
                          << rep.dump(2) << "\n";
            } else {
                emit(rep);
            }
            return 0;
        }
        if (*probe) {
            qid::CharExponentFn fn;
            if (use_polya) {
                qid::require(in_path.empty(), qid::ErrKind::BadInput,
                             "give either a triplet file or --polya, not both");
                fn = qid::CharExponentFn::user_supplied(
                    [](const Eigen::VectorXd& z) {
                        return std::complex<double>(1.0 - std::exp(z.norm()), 0.0);
                    },
                    1);
            } else {
                qid::require(!in_path.empty(), qid::ErrKind::BadInput,
                             "probe needs a triplet file or --polya");
                fn = qid::CharExponentFn::from_triplet(
                    qid::triplet_from_json(read_json(in_path)));
            }
            Eigen::VectorXd z;
            if (z_str.empty()) {
                z = Eigen::VectorXd::Zero(fn.dim);
                z[0] = 1.0;
            } else {
                z = parse_vector(z_str);
            }
            const std::vector<double> tg =
                tgrid_str.empty() ? parse_log_grid("0.1:1000:40") : parse_log_grid(tgrid_str);
            const qid::ProbeReport rep = qid::gaussian_probe(fn, z, tg);
            if (format == "table") {
                std::cout << "verdict: " << qid::to_string(rep.verdict) << "\n";
                for (std::size_t i = 0; i < rep.t.size(); ++i)
                    std::cout << fmt(rep.t[i]) << "  " << fmt(rep.q[i]) << "\n";
            } else {
                emit(qid::probe_report_to_json(rep));
            }
            return 0;
        }
        if (*cvg) {
            std::vector<qid::CharTriplet> seq;
            for (const std::string& p : seq_paths)
                seq.push_back(qid::triplet_from_json(read_json(p)));
            const qid::CharTriplet target = qid::triplet_from_json(read_json(target_path));
            std::vector<double> eps;
            if (!eps_str.empty()) eps = parse_numbers(eps_str);
            std::vector<qid::RampFn> family;
            if (!ramps_str.empty()) {
                std::stringstream ss(ramps_str);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const std::vector<double> ab = parse_numbers(item, ':');
                    qid::require(ab.size() == 2, qid::ErrKind::BadInput,
                                 "each ramp must be a:b");
                    family.emplace_back(ab[0], ab[1]);
                }
            }
            std::vector<double> labels;
            if (!labels_str.empty()) labels = parse_numbers(labels_str);
            const qid::ConvergenceReport rep = qid::convergence_report(
                seq, target, std::move(eps), std::move(family), std::move(labels));
            if (format == "csv") {
                std::cout << "label";
                for (std::size_t i = 0; i < rep.family.size(); ++i)
                    std::cout << ",f" << i + 1 << "_plus,f" << i + 1 << "_minus,f" << i + 1
                              << "_dev";
                for (std::size_t i = 0; i < rep.eps_grid.size(); ++i)
                    std::cout << ",a_dev_eps" << i + 1 << ",small_ball_eps" << i + 1;
                std::cout << ",gamma_dist\n";
                for (const auto& row : rep.rows) {
                    std::cout << fmt(row.label);
                    for (std::size_t i = 0; i < rep.family.size(); ++i)
                        std::cout << "," << fmt(row.f_plus[i]) << "," << fmt(row.f_minus[i])
                                  << "," << fmt(row.f_dev[i]);
                    for (std::size_t i = 0; i < rep.eps_grid.size(); ++i)
                        std::cout << "," << fmt(row.a_dev[i]) << "," << fmt(row.small_ball[i]);
                    std::cout << "," << fmt(row.gamma_dist) << "\n";
                }
            } else if (format == "table") {
                std::cout << "trends: cond1=" << qid::to_string(rep.cond1)
                          << " cond2=" << qid::to_string(rep.cond2)
                          << " cond3=" << qid::to_string(rep.cond3)
                          << " cond4=" << qid::to_string(rep.cond4) << "\n";
                for (const auto& row : rep.rows) {
                    double w1 = 0, w2 = 0, w3 = 0;
                    for (double v : row.f_dev) w1 = std::max(w1, v);
                    for (double v : row.a_dev) w2 = std::max(w2, v);
                    for (double v : row.small_ball) w3 = std::max(w3, v);
                    std::cout << fmt(row.label) << "  f_dev=" << fmt(w1)
                              << "  a_dev=" << fmt(w2) << "  small_ball=" << fmt(w3)
                              << "  gamma_dist=" << fmt(row.gamma_dist) << "\n";
                }
            } else {
                emit(qid::convergence_report_to_json(rep));
            }
            return 0;
        }
        if (*proj) {
            const qid::CharTriplet t = qid::triplet_from_json(read_json(in_path));
            const Eigen::VectorXd av = parse_vector(a_str);
            Eigen::VectorXi a(av.size());
            for (int i = 0; i < av.size(); ++i) {
                qid::require(av[i] == std::floor(av[i]), qid::ErrKind::BadInput,
                             "projection vector must be integer");
                a[i] = static_cast<int>(av[i]);
            }
            const qid::ProjectionCheck chk = qid::projection_id_check(t, a, mass_tol);
            if (format == "table") {
                std::cout << "id: " << (chk.id ? "yes" : "no")
                          << "  min weight: " << fmt(chk.min_weight) << "\n";
            } else {
                emit(qid::projection_check_to_json(chk));
            }
            return 0;
        }
    } catch (const qid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
