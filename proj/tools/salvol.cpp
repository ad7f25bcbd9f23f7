#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "salvol/commands.hpp"

using namespace salvol;

namespace {

void add_image_dims(CLI::App* cmd, ImageDims& dims, std::vector<int>& raw) {
    raw = {dims.width_px, dims.height_px};
    cmd->add_option("--image-dims", raw, "equirectangular frame W,H in pixels")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
}

ImageDims to_image_dims(const std::vector<int>& raw) {
    if (raw.size() != 2 || raw[0] <= 0 || raw[1] <= 0) throw ValidationError("--image-dims expects W,H > 0");
    return {raw[0], raw[1]};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saliency volumes, scanpath sampling and scanpath evaluation for 360-degree images"};
    app.require_subcommand(1);
    CommandStreams io{std::cout, std::cerr};

    // build-volume
    BuildVolumeOptions build;
    std::vector<int> build_image;
    std::vector<std::size_t> build_dims{build.volume.dims.t_bins, build.volume.dims.height, build.volume.dims.width};
    std::vector<double> build_bw{build.volume.bandwidths.sigma_t, build.volume.bandwidths.sigma_h,
                                 build.volume.bandwidths.sigma_w};
    auto* bv = app.add_subcommand("build-volume", "build a saliency volume from fixations of one image");
    bv->add_option("--fixations", build.fixations_path, "fixation CSV or JSON")->required();
    bv->add_option("--image-id", build.image_id, "image to build")->required();
    bv->add_option("--out", build.out_path, "output volume file")->required();
    bv->add_option("--dims", build_dims, "volume T,H,W")->delimiter(',')->expected(3)->capture_default_str();
    bv->add_option("--dt", build.volume.dt_s, "slice length in seconds")->capture_default_str();
    bv->add_option("--bandwidths", build_bw, "Gaussian sigmas t,h,w (slices, grid pixels)")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    bv->add_flag("--wrap-width", build.volume.wrap_width, "blur circularly across the longitude seam");
    add_image_dims(bv, build.image, build_image);

    // sample
    SampleOptions sample;
    std::vector<int> sample_image;
    std::string strategy = "naive";
    auto* sp = app.add_subcommand("sample", "generate scanpaths from a saliency volume");
    sp->add_option("--volume", sample.volume_path, "saliency volume file")->required();
    sp->add_option("--fixations", sample.fixations_path, "fixations to fit length and duration distributions")
        ->required();
    sp->add_option("--out", sample.out_path, "output scanpath JSON (stdout if omitted)");
    sp->add_option("--strategy", strategy, "naive, distance-limited, inhibition-of-return or random-baseline")
        ->capture_default_str();
    sp->add_option("--n", sample.sampling.num_scanpaths, "number of scanpaths")->capture_default_str();
    sp->add_option("--seed", sample.sampling.seed, "random seed")->capture_default_str();
    sp->add_option("--mask-sigma", sample.sampling.mask_sigma_px, "mask sigma in grid pixels")->capture_default_str();
    sp->add_option("--bin-width", sample.bin_width_s, "duration bin width in seconds")->capture_default_str();
    sp->add_option("--image-id", sample.image_id, "image id written to the scanpaths")->capture_default_str();
    sp->add_flag("--wrap-width", sample.sampling.wrap_width, "masks wrap across the longitude seam");
    add_image_dims(sp, sample.image, sample_image);

    // evaluate
    EvaluateOptions eval;
    std::vector<int> eval_image;
    auto* ev = app.add_subcommand("evaluate", "match generated scanpaths to ground truth");
    ev->add_option("--generated", eval.generated_path, "generated scanpath JSON")->required();
    ev->add_option("--truth", eval.truth_path, "truth scanpath JSON or fixation CSV/JSON")->required();
    ev->add_option("--image-id", eval.image_id, "truth image when the file holds several");
    ev->add_option("--out", eval.out_path, "report JSON (stdout if omitted)");
    ev->add_option("--duration-weight", eval.metric.duration_weight, "weight of the duration term")
        ->capture_default_str();
    add_image_dims(ev, eval.image, eval_image);

    // export
    ExportOptions ex;
    std::string mode = "map";
    auto* xp = app.add_subcommand("export", "write saliency maps or slices as PNG");
    xp->add_option("--volume", ex.volume_path, "saliency volume file")->required();
    xp->add_option("--mode", mode, "map, weighted or slices")->capture_default_str();
    xp->add_option("--weights", ex.weights, "per-slice weights for weighted mode")->delimiter(',');
    xp->add_option("--out-dir", ex.out_dir, "output directory")->required();

    // fit-dists
    FitDistsOptions fit;
    std::vector<int> fit_image;
    auto* fd = app.add_subcommand("fit-dists", "fit scanpath length and fixation duration distributions");
    fd->add_option("--fixations", fit.fixations_path, "fixation CSV or JSON")->required();
    fd->add_option("--image-id", fit.image_id, "restrict to one image");
    fd->add_option("--out", fit.out_path, "output JSON (stdout if omitted)");
    fd->add_option("--bin-width", fit.bin_width_s, "duration bin width in seconds")->capture_default_str();
    add_image_dims(fd, fit.image, fit_image);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (bv->parsed()) {
            build.image = to_image_dims(build_image);
            build.volume.dims = {build_dims[0], build_dims[1], build_dims[2]};
            build.volume.bandwidths = {build_bw[0], build_bw[1], build_bw[2]};
            cmd_build_volume(build, io);
        } else if (sp->parsed()) {
            sample.image = to_image_dims(sample_image);
            try {
                sample.sampling.strategy = parse_strategy(strategy);
            } catch (const ValidationError& e) {
                std::cerr << "usage error: " << e.what() << '\n';
                return 2;
            }
            cmd_sample(sample, io);
        } else if (ev->parsed()) {
            eval.image = to_image_dims(eval_image);
            cmd_evaluate(eval, io);
        } else if (xp->parsed()) {
            ex.mode = parse_export_mode(mode);
            cmd_export(ex, io);
        } else if (fd->parsed()) {
            fit.image = to_image_dims(fit_image);
            cmd_fit_dists(fit, io);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
