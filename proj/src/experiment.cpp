#include "gtvtomo/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gtvtomo/errors.hpp"
#include "gtvtomo/io.hpp"
#include "gtvtomo/projector.hpp"

namespace gtvtomo {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    const auto s = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("invalid value for '" + std::string(key) + "': " + std::string(text));
    return value;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string variant_name(bool denoised) { return denoised ? "gd" : "raw"; }

double sinogram_rel_error(const std::vector<double>& s, const std::vector<double>& clean) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        num += (s[i] - clean[i]) * (s[i] - clean[i]);
        den += clean[i] * clean[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct Reconstruction {
    Image image;
    ErrorCurve curve;
};

Reconstruction reconstruct(Method method, const ExperimentSpec& spec, const ProjectionOperator& A,
                           const std::vector<double>& b, const Image& truth) {
    const auto& g = A.geometry();
    const IterateTracker tracker = [&truth](const Image& x) { return l2_error(x, truth); };
    switch (method) {
    case Method::FBP: {
        Reconstruction r{fbp(Sinogram(g.p, g.q, b), g, spec.fbp), {{}, "FBP"}};
        r.curve.values.push_back(l2_error(r.image, truth));
        return r;
    }
    case Method::ART: {
        auto res = art(A, b, spec.art, Image(g.n), tracker);
        return {std::move(res.image), std::move(res.curve)};
    }
    case Method::SIRT: {
        auto res = sirt(A, b, spec.sirt, Image(g.n), tracker);
        return {std::move(res.image), std::move(res.curve)};
    }
    }
    throw std::logic_error("unhandled method");
}

MethodOutcome make_outcome(Method m, bool denoised, double gamma, double sino_err, Reconstruction rec) {
    const auto best = min_error(rec.curve);
    rec.curve.method_label = std::string(to_string(m)) + (denoised ? "-GD" : "");
    return {m,
            denoised,
            gamma,
            rec.curve.values.back(),
            best.value,
            best.iteration + 1,
            sino_err,
            std::move(rec.curve),
            std::move(rec.image)};
}

} // namespace

std::string_view to_string(Method m) {
    switch (m) {
    case Method::FBP: return "fbp";
    case Method::ART: return "art";
    case Method::SIRT: return "sirt";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    const auto s = lower(std::string(name));
    for (auto m : {Method::FBP, Method::ART, Method::SIRT})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown method: " + std::string(name));
}

void ExperimentSpec::validate() const {
    if (n < 8) throw std::invalid_argument("n must be at least 8");
    if (p < 1 || q < 1) throw std::invalid_argument("p and q must be positive");
    if (!(noise_level >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    patch.validate();
    if (gammas.empty()) throw std::invalid_argument("at least one gamma is required");
    for (double g : gammas)
        if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gammas must be finite and nonnegative");
    if (methods.empty()) throw std::invalid_argument("at least one method is required");
    art.validate();
    sirt.validate();
    DenoiseConfig d = denoise;
    d.gamma = 0.0;
    d.validate();
    if (profile_row >= n) throw std::invalid_argument("profile row outside the image");
    if (write_artifacts && output_dir.empty()) throw std::invalid_argument("output_dir is required");
}

void ExperimentSpec::set(std::string_view key_view, std::string_view value_view) {
    const std::string key = lower(trim(key_view));
    const std::string value = trim(value_view);
    const std::string lvalue = lower(value);
    if (key == "phantom") {
        phantom = parse_phantom_kind(lvalue);
    } else if (key == "n") {
        n = parse_number<int>(key, value);
    } else if (key == "p") {
        p = parse_number<int>(key, value);
    } else if (key == "q") {
        q = parse_number<int>(key, value);
    } else if (key == "noise") {
        noise_level = parse_number<double>(key, value);
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "patch_side") {
        patch.patch_side = parse_number<int>(key, value);
    } else if (key == "k") {
        patch.k = parse_number<int>(key, value);
    } else if (key == "sigma") {
        if (lvalue == "auto") {
            patch.sigma_rule = SigmaRule::AverageKnnDistance;
        } else {
            patch.sigma_rule = SigmaRule::Fixed;
            patch.fixed_sigma = parse_number<double>(key, value);
        }
    } else if (key == "gamma") {
        gammas = {parse_number<double>(key, value)};
    } else if (key == "gammas") {
        if (lvalue == "default") {
            gammas = default_gamma_grid();
        } else {
            gammas.clear();
            for (const auto& item : split_list(value)) gammas.push_back(parse_number<double>(key, item));
        }
    } else if (key == "methods") {
        methods.clear();
        for (const auto& item : split_list(value)) methods.push_back(parse_method(item));
    } else if (key == "art_lambda") {
        art.lambda = parse_number<double>(key, value);
    } else if (key == "art_sweeps") {
        art.sweeps = parse_number<int>(key, value);
    } else if (key == "art_order") {
        if (lvalue == "sequential")
            art.row_order = RowOrder::Sequential;
        else if (lvalue == "randomized")
            art.row_order = RowOrder::Randomized;
        else
            throw std::invalid_argument("art_order must be sequential or randomized");
    } else if (key == "art_seed") {
        art.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "sirt_lambda") {
        sirt.lambda = parse_number<double>(key, value);
    } else if (key == "sirt_iterations") {
        sirt.iterations = parse_number<int>(key, value);
    } else if (key == "fbp_filter") {
        if (lvalue == "ramlak")
            fbp.filter = FbpFilter::RamLak;
        else if (lvalue == "shepplogan")
            fbp.filter = FbpFilter::SheppLogan;
        else if (lvalue == "cosine")
            fbp.filter = FbpFilter::Cosine;
        else
            throw std::invalid_argument("fbp_filter must be ramlak, shepplogan or cosine");
    } else if (key == "fbp_interpolation") {
        if (lvalue == "linear")
            fbp.interpolation = Interpolation::Linear;
        else if (lvalue == "nearest")
            fbp.interpolation = Interpolation::Nearest;
        else
            throw std::invalid_argument("fbp_interpolation must be linear or nearest");
    } else if (key == "epsilon") {
        denoise.epsilon = parse_number<double>(key, value);
    } else if (key == "max_iters") {
        denoise.max_iters = parse_number<int>(key, value);
    } else if (key == "threshold") {
        if (lvalue == "symmetric")
            denoise.threshold_mode = ThresholdMode::Symmetric;
        else if (lvalue == "paper_literal")
            denoise.threshold_mode = ThresholdMode::PaperLiteral;
        else
            throw std::invalid_argument("threshold must be symmetric or paper_literal");
    } else if (key == "profile_row") {
        profile_row = parse_number<int>(key, value);
    } else if (key == "output_dir") {
        output_dir = value;
    } else {
        throw std::invalid_argument("unknown spec key: " + key);
    }
}

ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read spec file " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto content = trim(std::string_view(line).substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        base.set(std::string_view(content).substr(0, eq), std::string_view(content).substr(eq + 1));
    }
    return base;
}

const MethodOutcome& ExperimentSummary::find(Method m, bool denoised) const {
    for (const auto& o : outcomes)
        if (o.method == m && o.denoised == denoised) return o;
    throw std::out_of_range("no outcome for method " + std::string(to_string(m)));
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    namespace fs = std::filesystem;
    if (spec.write_artifacts) {
        std::error_code ec;
        fs::create_directories(spec.output_dir, ec);
        if (ec) throw IoError("cannot create " + spec.output_dir.string() + ": " + ec.message());
    }

    const Image truth = generate_phantom(spec.phantom, spec.n, spec.seed);
    const auto geometry = Geometry::parallel(spec.n, spec.p, spec.q);
    const auto A = build_projector(geometry);
    const Sinogram clean = forward_project(A, truth);
    const Sinogram noisy = add_noise(clean, {spec.noise_level, spec.seed});

    const PatchGraph graph = build_graph(extract_patches(noisy, spec.patch), spec.patch);

    // Denoise once per gamma; every method then picks its own best gamma.
    std::vector<std::vector<double>> denoised;
    std::vector<DenoiseTrace> traces;
    denoised.reserve(spec.gammas.size());
    for (double gamma : spec.gammas) {
        DenoiseConfig cfg = spec.denoise;
        cfg.gamma = gamma;
        auto res = denoise(noisy.values, graph, cfg);
        denoised.push_back(std::move(res.z));
        traces.push_back(std::move(res.trace));
    }

    ExperimentSummary summary;
    summary.noisy_rel_error = sinogram_rel_error(noisy.values, clean.values);
    std::vector<std::size_t> chosen;
    for (Method m : spec.methods) {
        auto raw = reconstruct(m, spec, A, noisy.values, truth);
        summary.outcomes.push_back(make_outcome(m, false, 0.0, summary.noisy_rel_error, std::move(raw)));

        std::size_t best = 0;
        std::optional<Reconstruction> best_rec;
        double best_score = INFINITY;
        for (std::size_t k = 0; k < spec.gammas.size(); ++k) {
            auto rec = reconstruct(m, spec, A, denoised[k], truth);
            const double score = min_error(rec.curve).value;
            if (!best_rec || score < best_score || (score == best_score && spec.gammas[k] < spec.gammas[best])) {
                best = k;
                best_score = score;
                best_rec = std::move(rec);
            }
        }
        summary.outcomes.push_back(make_outcome(m, true, spec.gammas[best],
                                                sinogram_rel_error(denoised[best], clean.values),
                                                std::move(*best_rec)));
        chosen.push_back(best);
    }

    if (!spec.write_artifacts) return summary;

    const fs::path dir = spec.output_dir;
    auto record = [&](const fs::path& name) {
        summary.artifacts.push_back(dir / name);
        return dir / name;
    };
    io::write_raw_image(record("phantom.img"), truth);
    io::write_pgm(record("phantom.pgm"), truth);
    io::write_sinogram(record("clean.sino"), clean);
    io::write_sinogram_csv(record("clean.csv"), clean);
    io::write_sinogram(record("noisy.sino"), noisy);
    io::write_sinogram_csv(record("noisy.csv"), noisy);
    io::write_edges_csv(record("graph_edges.csv"), graph);

    const int row = spec.profile_row >= 0 ? spec.profile_row : spec.n / 2;
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        const std::string m(to_string(spec.methods[mi]));
        const Sinogram den(spec.p, spec.q, denoised[chosen[mi]]);
        io::write_sinogram(record("denoised_" + m + ".sino"), den);
        io::write_sinogram_csv(record("denoised_" + m + ".csv"), den);
        io::write_trace_csv(record("denoise_trace_" + m + ".csv"), traces[chosen[mi]]);
    }
    for (const auto& o : summary.outcomes) {
        const std::string stem = std::string(to_string(o.method)) + "_" + variant_name(o.denoised);
        io::write_raw_image(record("recon_" + stem + ".img"), o.image);
        io::write_pgm(record("recon_" + stem + ".pgm"), o.image);
        io::write_curve_csv(record("curve_" + stem + ".csv"), o.curve);
        io::write_profile_csv(record("profile_" + stem + ".csv"), profile(o.image, row));
    }
    io::write_profile_csv(record("profile_truth.csv"), profile(truth, row));

    write_summary_csv(record("summary.csv"), summary);
    {
        std::ofstream out(record("summary.txt"));
        if (!out) throw IoError("cannot write summary.txt in " + dir.string());
        out << "phantom " << to_string(spec.phantom) << "  n " << spec.n << "  sinogram " << spec.p << "x" << spec.q
            << "  noise " << spec.noise_level << "  seed " << spec.seed << '\n';
        out << "noisy sinogram relative error " << std::setprecision(6) << summary.noisy_rel_error << "\n\n";
        out << std::left << std::setw(10) << "method" << std::setw(10) << "gamma" << std::setw(14) << "final"
            << std::setw(14) << "min" << std::setw(8) << "argmin" << "sino_err\n";
        for (const auto& o : summary.outcomes) {
            std::string label(to_string(o.method));
            std::transform(label.begin(), label.end(), label.begin(), ::toupper);
            if (o.denoised) label += "-GD";
            out << std::setw(10) << label << std::setw(10) << o.gamma << std::setw(14) << o.final_error
                << std::setw(14) << o.min_error << std::setw(8) << o.argmin_iteration << o.sinogram_rel_error << '\n';
        }
        if (!out) throw IoError("write failed: summary.txt");
    }
    return summary;
}

void write_summary_csv(const std::filesystem::path& path, const ExperimentSummary& summary) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    out << "method,variant,gamma,final_error,min_error,argmin_iteration,sinogram_rel_error\n";
    for (const auto& o : summary.outcomes)
        out << to_string(o.method) << ',' << variant_name(o.denoised) << ',' << o.gamma << ',' << o.final_error << ','
            << o.min_error << ',' << o.argmin_iteration << ',' << o.sinogram_rel_error << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

Table1Cell aggregate(std::vector<double> samples) {
    Table1Cell cell;
    double sum = 0.0;
    for (double v : samples) sum += v;
    cell.mean = sum / static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - cell.mean) * (v - cell.mean);
    cell.stddev = samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
    cell.samples = std::move(samples);
    return cell;
}

std::string format_noise(double level) {
    std::ostringstream s;
    s << level;
    return s.str();
}

} // namespace

Table1 run_table1(const std::filesystem::path& output_dir, const Table1Options& options) {
    if (options.seeds.empty()) throw std::invalid_argument("table1 needs at least one seed");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create " + output_dir.string() + ": " + ec.message());

    Table1 table;
    for (auto [phantom, iterative] : {std::pair{PhantomKind::SheppLogan, Method::ART},
                                      std::pair{PhantomKind::Smooth, Method::SIRT}}) {
        for (double level : options.noise_levels) {
            std::vector<double> fbp_raw, fbp_gd, it_raw, it_gd;
            for (auto seed : options.seeds) {
                ExperimentSpec spec;
                spec.phantom = phantom;
                spec.n = options.n;
                spec.p = options.p;
                spec.q = options.q;
                spec.noise_level = level;
                spec.seed = seed;
                spec.gammas = options.gammas;
                spec.methods = {Method::FBP, iterative};
                spec.art = options.art;
                spec.sirt = options.sirt;
                spec.denoise = options.denoise;
                spec.write_artifacts = options.write_run_artifacts;
                spec.output_dir = output_dir / (std::string(to_string(phantom)) + "_rn" + format_noise(level) +
                                                "_seed" + std::to_string(seed));
                const auto summary = run_experiment(spec);
                fbp_raw.push_back(summary.find(Method::FBP, false).min_error);
                fbp_gd.push_back(summary.find(Method::FBP, true).min_error);
                it_raw.push_back(summary.find(iterative, false).min_error);
                it_gd.push_back(summary.find(iterative, true).min_error);
            }
            table.rows.push_back({phantom, level, iterative, aggregate(std::move(fbp_raw)), aggregate(std::move(fbp_gd)),
                                  aggregate(std::move(it_raw)), aggregate(std::move(it_gd))});
        }
    }

    std::ofstream csv(output_dir / "table1.csv");
    if (!csv) throw IoError("cannot write table1.csv in " + output_dir.string());
    csv << std::setprecision(17);
    csv << "phantom,noise,iterative,fbp_mean,fbp_std,fbp_gd_mean,fbp_gd_std,iter_mean,iter_std,iter_gd_mean,"
           "iter_gd_std\n";
    for (const auto& r : table.rows)
        csv << to_string(r.phantom) << ',' << r.noise_level << ',' << to_string(r.iterative) << ',' << r.fbp.mean << ','
            << r.fbp.stddev << ',' << r.fbp_gd.mean << ',' << r.fbp_gd.stddev << ',' << r.iter.mean << ','
            << r.iter.stddev << ',' << r.iter_gd.mean << ',' << r.iter_gd.stddev << '\n';
    if (!csv) throw IoError("write failed: table1.csv");

    std::ofstream txt(output_dir / "table1.txt");
    if (!txt) throw IoError("cannot write table1.txt in " + output_dir.string());
    txt << "Comparison of regular and graph-denoised (GD) reconstructions, minimum l2 error, mean (std) over "
        << options.seeds.size() << " seed(s)\n\n";
    auto cell = [](const Table1Cell& c) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << c.mean << " (" << c.stddev << ")";
        return s.str();
    };
    Method header_for = Method::FBP;
    for (const auto& r : table.rows) {
        if (r.iterative != header_for) {
            header_for = r.iterative;
            std::string it(to_string(r.iterative));
            std::transform(it.begin(), it.end(), it.begin(), ::toupper);
            txt << std::left << std::setw(26) << "Phantom" << std::setw(16) << "FBP" << std::setw(16) << "FBP-GD"
                << std::setw(16) << it << std::setw(16) << it + "-GD" << '\n';
        }
        const std::string name = r.phantom == PhantomKind::SheppLogan ? "Shepp-Logan" : "Smooth";
        txt << std::left << std::setw(26) << (name + " (RN=" + format_noise(r.noise_level) + ")") << std::setw(16)
            << cell(r.fbp) << std::setw(16) << cell(r.fbp_gd) << std::setw(16) << cell(r.iter) << std::setw(16)
            << cell(r.iter_gd) << '\n';
    }
    if (!txt) throw IoError("write failed: table1.txt");
    return table;
}

} // namespace gtvtomo
