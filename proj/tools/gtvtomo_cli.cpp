// Command-line front end: individual pipeline stages plus the full
// experiment and the four-row comparison table.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gtvtomo/errors.hpp"
#include "gtvtomo/experiment.hpp"
#include "gtvtomo/io.hpp"

namespace fs = std::filesystem;
using namespace gtvtomo;

namespace {

enum ExitCode { kOk = 0, kInvalidSpec = 2, kIoFailure = 3, kDivergence = 4 };

constexpr const char* kGammaHelp =
    "TV weight gamma. The TV term counts every unordered pixel pair once; a formulation summing over "
    "ordered pairs (i,j) and (j,i) corresponds to twice this value";

std::vector<double> parse_doubles(const std::string& list) {
    ExperimentSpec tmp;
    tmp.set("gammas", list);
    return tmp.gammas;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start < list.size()) {
        auto comma = list.find(',', start);
        if (comma == std::string::npos) comma = list.size();
        const auto item = list.substr(start, comma - start);
        if (!item.empty()) {
            std::size_t used = 0;
            const auto v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument("bad seed: " + item);
            out.push_back(v);
        }
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("at least one seed is required");
    return out;
}

// Experiment flags map one-to-one onto spec-file keys and are applied after
// the file, in command-line order.
struct SpecOverrides {
    std::vector<std::pair<std::string, std::string>> items;
};

void add_spec_flag(CLI::App* cmd, SpecOverrides& ov, const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
        if (ch == '_') ch = '-';
    cmd->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.items.emplace_back(key, v); }, help);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph total-variation sinogram denoising and tomographic reconstruction"};
    app.require_subcommand(1);

    // phantom
    auto* phantom_cmd = app.add_subcommand("phantom", "Generate a test image");
    std::string kind = "shepplogan";
    int phantom_n = 64;
    std::uint64_t phantom_seed = 0;
    fs::path phantom_out, phantom_pgm;
    phantom_cmd->add_option("--kind", kind, "shepplogan|smooth|binary|grains|fourphases")->capture_default_str();
    phantom_cmd->add_option("--n", phantom_n, "Image side length")->capture_default_str();
    phantom_cmd->add_option("--seed", phantom_seed, "Seed for the random phantoms")->capture_default_str();
    phantom_cmd->add_option("--out", phantom_out, "Raw float64 image (IMG header)")->required();
    phantom_cmd->add_option("--pgm", phantom_pgm, "Optional 8-bit PGM preview");

    // project
    auto* project_cmd = app.add_subcommand("project", "Forward-project an image into a sinogram");
    fs::path project_in, project_out, project_csv;
    int project_p = 95, project_q = 36;
    project_cmd->add_option("--image", project_in, "Raw image")->required();
    project_cmd->add_option("--p", project_p, "Rays per angle")->capture_default_str();
    project_cmd->add_option("--q", project_q, "Number of angles in [0, 180)")->capture_default_str();
    project_cmd->add_option("--out", project_out, "Sinogram (SINO header)")->required();
    project_cmd->add_option("--csv", project_csv, "Optional CSV export");

    // noise
    auto* noise_cmd = app.add_subcommand("noise", "Add Gaussian noise at a relative level");
    fs::path noise_in, noise_out;
    NoiseSpec noise_spec{0.08, 1};
    noise_cmd->add_option("--in", noise_in, "Input sinogram")->required();
    noise_cmd->add_option("--level", noise_spec.relative_level, "||noise|| / ||sinogram||")->capture_default_str();
    noise_cmd->add_option("--seed", noise_spec.seed, "Noise seed")->capture_default_str();
    noise_cmd->add_option("--out", noise_out, "Output sinogram")->required();

    // denoise
    auto* denoise_cmd = app.add_subcommand("denoise", "Graph-TV denoise a sinogram");
    fs::path denoise_in, denoise_out, denoise_trace, denoise_edges;
    PatchConfig patch;
    DenoiseConfig dcfg{0.5, 1e-6, 500};
    std::string sigma = "auto", threshold = "symmetric";
    denoise_cmd->add_option("--in", denoise_in, "Noisy sinogram")->required();
    denoise_cmd->add_option("--out", denoise_out, "Denoised sinogram")->required();
    denoise_cmd->add_option("--gamma", dcfg.gamma, kGammaHelp)->capture_default_str();
    denoise_cmd->add_option("--patch-side", patch.patch_side, "Odd patch side l")->capture_default_str();
    denoise_cmd->add_option("--k", patch.k, "Nearest neighbours per patch")->capture_default_str();
    denoise_cmd->add_option("--sigma", sigma, "Kernel width, or 'auto' for the mean K-NN distance")
        ->capture_default_str();
    denoise_cmd->add_option("--epsilon", dcfg.epsilon, "Relative objective-change tolerance")->capture_default_str();
    denoise_cmd->add_option("--max-iters", dcfg.max_iters, "Iteration cap")->capture_default_str();
    denoise_cmd->add_option("--threshold", threshold, "symmetric|paper_literal")->capture_default_str();
    denoise_cmd->add_option("--trace", denoise_trace, "Objective trace CSV");
    denoise_cmd->add_option("--edges", denoise_edges, "Graph edge-list CSV");

    // reconstruct
    auto* recon_cmd = app.add_subcommand("reconstruct", "Reconstruct an image from a sinogram");
    fs::path recon_in, recon_out, recon_truth, recon_curve, recon_pgm;
    std::string method = "fbp";
    int recon_n = 64;
    ArtConfig art_cfg{0.25, 100};
    SirtConfig sirt_cfg{20.0, 200};
    recon_cmd->add_option("--in", recon_in, "Sinogram")->required();
    recon_cmd->add_option("--out", recon_out, "Raw output image")->required();
    recon_cmd->add_option("--method", method, "fbp|art|sirt")->capture_default_str();
    recon_cmd->add_option("--n", recon_n, "Image side length")->capture_default_str();
    recon_cmd->add_option("--truth", recon_truth, "Ground-truth raw image for the error curve");
    recon_cmd->add_option("--curve", recon_curve, "Error curve CSV (requires --truth)");
    recon_cmd->add_option("--pgm", recon_pgm, "Optional PGM preview");
    recon_cmd->add_option("--art-lambda", art_cfg.lambda, "ART relaxation in (0, 2)")->capture_default_str();
    recon_cmd->add_option("--art-sweeps", art_cfg.sweeps, "ART sweeps")->capture_default_str();
    recon_cmd->add_option("--sirt-lambda", sirt_cfg.lambda, "SIRT relaxation")->capture_default_str();
    recon_cmd->add_option("--sirt-iterations", sirt_cfg.iterations, "SIRT iterations")->capture_default_str();

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Run the full denoise-then-reconstruct pipeline");
    fs::path spec_file;
    SpecOverrides overrides;
    exp_cmd->add_option("--spec", spec_file, "key = value spec file");
    add_spec_flag(exp_cmd, overrides, "phantom", "Phantom kind");
    add_spec_flag(exp_cmd, overrides, "n", "Image side length");
    add_spec_flag(exp_cmd, overrides, "p", "Rays per angle");
    add_spec_flag(exp_cmd, overrides, "q", "Number of angles");
    add_spec_flag(exp_cmd, overrides, "noise", "Relative noise level");
    add_spec_flag(exp_cmd, overrides, "seed", "Seed for phantom and noise");
    add_spec_flag(exp_cmd, overrides, "patch_side", "Odd patch side");
    add_spec_flag(exp_cmd, overrides, "k", "Nearest neighbours");
    add_spec_flag(exp_cmd, overrides, "sigma", "Kernel width or 'auto'");
    add_spec_flag(exp_cmd, overrides, "gamma", kGammaHelp);
    add_spec_flag(exp_cmd, overrides, "gammas", "Comma-separated gamma sweep, or 'default'");
    add_spec_flag(exp_cmd, overrides, "methods", "Comma-separated subset of fbp,art,sirt");
    add_spec_flag(exp_cmd, overrides, "art_lambda", "ART relaxation");
    add_spec_flag(exp_cmd, overrides, "art_sweeps", "ART sweeps");
    add_spec_flag(exp_cmd, overrides, "art_order", "sequential|randomized");
    add_spec_flag(exp_cmd, overrides, "art_seed", "Row-order seed");
    add_spec_flag(exp_cmd, overrides, "sirt_lambda", "SIRT relaxation");
    add_spec_flag(exp_cmd, overrides, "sirt_iterations", "SIRT iterations");
    add_spec_flag(exp_cmd, overrides, "fbp_filter", "ramlak|shepplogan|cosine");
    add_spec_flag(exp_cmd, overrides, "fbp_interpolation", "linear|nearest");
    add_spec_flag(exp_cmd, overrides, "epsilon", "Denoiser tolerance");
    add_spec_flag(exp_cmd, overrides, "max_iters", "Denoiser iteration cap");
    add_spec_flag(exp_cmd, overrides, "threshold", "symmetric|paper_literal");
    add_spec_flag(exp_cmd, overrides, "profile_row", "Row for intensity profiles");
    add_spec_flag(exp_cmd, overrides, "output_dir", "Output directory");

    // table1
    auto* table_cmd = app.add_subcommand("table1", "Regular vs graph-denoised comparison table");
    fs::path table_dir;
    std::string seeds = "1", noise_levels = "0.05,0.08", table_gammas = "default";
    Table1Options topt;
    table_cmd->add_option("--output-dir", table_dir, "Output directory")->required();
    table_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->capture_default_str();
    table_cmd->add_option("--noise-levels", noise_levels, "Comma-separated relative noise levels")
        ->capture_default_str();
    table_cmd->add_option("--gammas", table_gammas, "Comma-separated gamma sweep, or 'default'")
        ->capture_default_str();
    table_cmd->add_option("--n", topt.n, "Image side length")->capture_default_str();
    table_cmd->add_option("--p", topt.p, "Rays per angle")->capture_default_str();
    table_cmd->add_option("--q", topt.q, "Number of angles")->capture_default_str();
    table_cmd->add_option("--art-sweeps", topt.art.sweeps, "ART sweeps")->capture_default_str();
    table_cmd->add_option("--sirt-lambda", topt.sirt.lambda, "SIRT relaxation")->capture_default_str();
    table_cmd->add_option("--sirt-iterations", topt.sirt.iterations, "SIRT iterations")->capture_default_str();
    table_cmd->add_flag("--write-runs", topt.write_run_artifacts, "Keep per-run artifacts in subdirectories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidSpec;
    }

    try {
        if (*phantom_cmd) {
            const auto img = generate_phantom(parse_phantom_kind(kind), phantom_n, phantom_seed);
            io::write_raw_image(phantom_out, img);
            if (!phantom_pgm.empty()) io::write_pgm(phantom_pgm, img);
        } else if (*project_cmd) {
            const auto img = io::read_raw_image(project_in);
            const auto A = build_projector(Geometry::parallel(img.n, project_p, project_q));
            const auto s = forward_project(A, img);
            io::write_sinogram(project_out, s);
            if (!project_csv.empty()) io::write_sinogram_csv(project_csv, s);
        } else if (*noise_cmd) {
            io::write_sinogram(noise_out, add_noise(io::read_sinogram(noise_in), noise_spec));
        } else if (*denoise_cmd) {
            ExperimentSpec parsed;
            parsed.set("sigma", sigma);
            parsed.set("threshold", threshold);
            patch.sigma_rule = parsed.patch.sigma_rule;
            patch.fixed_sigma = parsed.patch.fixed_sigma;
            dcfg.threshold_mode = parsed.denoise.threshold_mode;
            const auto s = io::read_sinogram(denoise_in);
            const auto graph = build_graph(extract_patches(s, patch), patch);
            auto res = denoise(s.values, graph, dcfg);
            io::write_sinogram(denoise_out, Sinogram(s.p, s.q, std::move(res.z)));
            if (!denoise_trace.empty()) io::write_trace_csv(denoise_trace, res.trace);
            if (!denoise_edges.empty()) io::write_edges_csv(denoise_edges, graph);
            std::cout << "iterations " << res.trace.iterations_run << (res.trace.converged ? " (converged)" : "")
                      << ", sigma " << graph.sigma() << ", tau " << graph.tau() << ", edges " << graph.edge_count()
                      << '\n';
        } else if (*recon_cmd) {
            const auto s = io::read_sinogram(recon_in);
            const auto geometry = Geometry::parallel(recon_n, s.p, s.q);
            std::optional<Image> truth;
            if (!recon_truth.empty()) truth = io::read_raw_image(recon_truth);
            if (!recon_curve.empty() && !truth) throw std::invalid_argument("--curve requires --truth");
            IterateTracker tracker;
            if (truth) tracker = [&truth](const Image& x) { return l2_error(x, *truth); };

            ReconResult result;
            switch (parse_method(method)) {
            case Method::FBP:
                result.image = fbp(s, geometry, {});
                result.curve.method_label = "FBP";
                if (tracker) result.curve.values.push_back(tracker(result.image));
                break;
            case Method::ART:
                result = art(build_projector(geometry), s.values, art_cfg, Image(recon_n), tracker);
                break;
            case Method::SIRT:
                result = sirt(build_projector(geometry), s.values, sirt_cfg, Image(recon_n), tracker);
                break;
            }
            io::write_raw_image(recon_out, result.image);
            if (!recon_pgm.empty()) io::write_pgm(recon_pgm, result.image);
            if (!recon_curve.empty()) io::write_curve_csv(recon_curve, result.curve);
            if (truth) {
                const auto best = min_error(result.curve);
                std::cout << "final error " << result.curve.values.back() << ", min error " << best.value
                          << " at iteration " << best.iteration + 1 << '\n';
            }
        } else if (*exp_cmd) {
            ExperimentSpec spec;
            spec.output_dir = "experiment_out";
            if (!spec_file.empty()) spec = load_spec(spec_file, spec);
            for (const auto& [key, value] : overrides.items) spec.set(key, value);
            const auto summary = run_experiment(spec);
            std::ifstream txt(spec.output_dir / "summary.txt");
            std::cout << txt.rdbuf();
            std::cout << "\n" << summary.artifacts.size() << " files written to " << spec.output_dir.string() << '\n';
        } else if (*table_cmd) {
            topt.seeds = parse_seeds(seeds);
            topt.noise_levels = parse_doubles(noise_levels);
            topt.gammas = parse_doubles(table_gammas);
            run_table1(table_dir, topt);
            std::ifstream txt(table_dir / "table1.txt");
            std::cout << txt.rdbuf();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidSpec;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: value out of range: " << e.what() << '\n';
        return kInvalidSpec;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return kDivergence;
    }
    return kOk;
}
