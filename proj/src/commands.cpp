#include "salvol/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include "salvol/volume_io.hpp"

namespace salvol {

namespace {

nlohmann::json dims_json(ImageDims d) { return {d.width_px, d.height_px}; }

WarningSink warnings_to(std::ostream& err) {
    return [&err](std::string_view msg) { err << "warning: " << msg << '\n'; };
}

void echo(CommandStreams io, const nlohmann::json& config) { io.err << config.dump() << '\n'; }

void emit(CommandStreams io, const std::string& path, const std::string& text) {
    if (path.empty())
        io.out << text;
    else
        write_file(path, text);
}

FixationDataset select_image(FixationDataset ds, const std::string& image_id) {
    if (image_id.empty()) return ds;
    FixationDataset one;
    one.images.emplace(image_id, ds.image(image_id));
    return one;
}

} // namespace

std::string_view to_string(ExportMode m) {
    switch (m) {
    case ExportMode::map: return "map";
    case ExportMode::weighted: return "weighted";
    case ExportMode::slices: return "slices";
    }
    return "unknown";
}

ExportMode parse_export_mode(std::string_view name) {
    for (auto m : {ExportMode::map, ExportMode::weighted, ExportMode::slices})
        if (name == to_string(m)) return m;
    throw ValidationError("unknown export mode '" + std::string(name) + "' (expected map, weighted or slices)");
}

nlohmann::json to_json(const BuildVolumeOptions& o) {
    const auto& v = o.volume;
    return {{"command", "build-volume"},
            {"fixations", o.fixations_path},
            {"image_id", o.image_id},
            {"out", o.out_path},
            {"image_dims", dims_json(o.image)},
            {"dims", {v.dims.t_bins, v.dims.height, v.dims.width}},
            {"dt_s", v.dt_s},
            {"bandwidths", {v.bandwidths.sigma_t, v.bandwidths.sigma_h, v.bandwidths.sigma_w}},
            {"wrap_width", v.wrap_width}};
}

nlohmann::json to_json(const SampleOptions& o) {
    const auto& s = o.sampling;
    return {{"command", "sample"},
            {"volume", o.volume_path},
            {"fixations", o.fixations_path},
            {"out", o.out_path},
            {"image_id", o.image_id},
            {"image_dims", dims_json(o.image)},
            {"bin_width_s", o.bin_width_s},
            {"strategy", to_string(s.strategy)},
            {"n", s.num_scanpaths},
            {"seed", s.seed},
            {"mask_sigma_px", s.mask_sigma_px},
            {"wrap_width", s.wrap_width}};
}

nlohmann::json to_json(const EvaluateOptions& o) {
    return {{"command", "evaluate"},
            {"generated", o.generated_path},
            {"truth", o.truth_path},
            {"image_id", o.image_id},
            {"out", o.out_path},
            {"image_dims", dims_json(o.image)},
            {"position_weight", o.metric.position_weight},
            {"duration_weight", o.metric.duration_weight}};
}

nlohmann::json to_json(const ExportOptions& o) {
    return {{"command", "export"},
            {"volume", o.volume_path},
            {"mode", to_string(o.mode)},
            {"weights", o.weights},
            {"out_dir", o.out_dir}};
}

nlohmann::json to_json(const FitDistsOptions& o) {
    return {{"command", "fit-dists"},
            {"fixations", o.fixations_path},
            {"image_id", o.image_id},
            {"out", o.out_path},
            {"image_dims", dims_json(o.image)},
            {"bin_width_s", o.bin_width_s}};
}

void cmd_build_volume(const BuildVolumeOptions& o, CommandStreams io) {
    echo(io, to_json(o));
    if (o.image_id.empty()) throw ValidationError("an image id is required");
    if (o.out_path.empty()) throw ValidationError("an output path is required");

    const auto ds = load_fixations(o.fixations_path, o.image, warnings_to(io.err));
    const auto& rec = ds.image(o.image_id);
    const auto v = build_saliency_volume(rec.scanpaths, rec.dims, o.volume);
    write_volume(o.out_path, v);

    io.out << "dims " << v.t_bins() << ' ' << v.height() << ' ' << v.width() << '\n';
    char line[64];
    for (std::size_t t = 0; t < v.t_bins(); ++t) {
        std::snprintf(line, sizeof line, "slice %zu sum %.9f\n", t, v.slice_sum(t));
        io.out << line;
    }
}

void cmd_sample(const SampleOptions& o, CommandStreams io) {
    echo(io, to_json(o));
    const auto v = read_volume(o.volume_path);
    const auto ds = load_fixations(o.fixations_path, o.image, warnings_to(io.err));
    const auto counts = fit_count_distribution(ds);
    const auto durations = fit_duration_distribution(ds, o.bin_width_s);
    const auto paths = generate_scanpaths(v, counts, durations, o.sampling, o.image, o.image_id, warnings_to(io.err));
    emit(io, o.out_path, serialize_scanpaths(paths) + "\n");
}

std::vector<ScanPath> load_truth(const std::string& path, const std::string& image_id, ImageDims image,
                                 const WarningSink& warnings) {
    const auto bytes = read_file(path);
    if (format_from_path(path) == FixationFormat::json) {
        const auto doc = nlohmann::json::parse(bytes, nullptr, false);
        const bool scanpath_doc =
            doc.is_object() ? doc.contains("fixations")
                            : doc.is_array() && !doc.empty() && doc.front().is_object() && doc.front().contains("fixations");
        if (scanpath_doc) {
            auto paths = parse_scanpaths(bytes);
            std::vector<ScanPath> kept;
            for (auto& sp : paths) {
                if (!image_id.empty() && sp.image_id != image_id) continue;
                validate_scanpath(sp, image);
                kept.push_back(std::move(sp));
            }
            return kept;
        }
    }
    const auto ds = parse_fixations(bytes, format_from_path(path), image, warnings);
    if (image_id.empty()) {
        if (ds.images.size() != 1)
            throw ValidationError("truth file holds " + std::to_string(ds.images.size()) +
                                  " images; select one with an image id");
        return ds.images.begin()->second.scanpaths;
    }
    return ds.image(image_id).scanpaths;
}

void cmd_evaluate(const EvaluateOptions& o, CommandStreams io) {
    echo(io, to_json(o));
    const auto generated = parse_scanpaths(read_file(o.generated_path));
    for (const auto& sp : generated) validate_scanpath(sp, o.image);
    const auto truth = load_truth(o.truth_path, o.image_id, o.image, warnings_to(io.err));
    const auto result = evaluate_sets(generated, truth, o.image, o.metric);
    emit(io, o.out_path, evaluation_report(result).dump(2) + "\n");
}

void cmd_export(const ExportOptions& o, CommandStreams io) {
    echo(io, to_json(o));
    if (o.out_dir.empty()) throw ValidationError("an output directory is required");
    const auto v = read_volume(o.volume_path);
    std::filesystem::create_directories(o.out_dir);
    const std::filesystem::path dir(o.out_dir);

    auto save = [&](const std::string& name, std::span<const double> values) {
        const auto path = (dir / name).string();
        write_png(path, to_heatmap(values, v.height(), v.width()));
        io.out << path << '\n';
    };

    switch (o.mode) {
    case ExportMode::map:
        save("map.png", extract_saliency_map(v).values);
        break;
    case ExportMode::weighted:
        save("weighted.png", extract_weighted_map(v, o.weights).values);
        break;
    case ExportMode::slices:
        for (std::size_t t = 0; t < v.t_bins(); ++t) {
            char name[32];
            std::snprintf(name, sizeof name, "slice_%02zu.png", t);
            save(name, v.slice(t));
        }
        break;
    }
}

void cmd_fit_dists(const FitDistsOptions& o, CommandStreams io) {
    echo(io, to_json(o));
    const auto ds = select_image(load_fixations(o.fixations_path, o.image, warnings_to(io.err)), o.image_id);
    const nlohmann::json doc = {{"count", distribution_to_json(fit_count_distribution(ds))},
                                {"duration", distribution_to_json(fit_duration_distribution(ds, o.bin_width_s))}};
    emit(io, o.out_path, doc.dump(2) + "\n");
}

} // namespace salvol
