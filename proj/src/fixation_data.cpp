#include "salvol/fixation_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace salvol {

namespace {

std::string format_number(double v) {
    std::array<char, 32> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

double parse_number(std::string_view field, std::size_t line, std::string_view name) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ParseError(line, "field '" + std::string(name) + "' is not a finite number: '" +
                                   std::string(field) + "'");
    return v;
}

struct Row {
    std::string image_id;
    std::string observer_id;
    Fixation fixation;
    std::size_t line;
};

void check_row(const Row& r, ImageDims dims) {
    const auto& f = r.fixation;
    auto where = [&] {
        return "row at line " + std::to_string(r.line) + " (" + r.image_id + "/" + r.observer_id + ")";
    };
    if (r.image_id.empty() || r.observer_id.empty())
        throw ValidationError(where() + ": empty identifier");
    if (f.x_px < 0.0 || f.x_px >= dims.width_px || f.y_px < 0.0 || f.y_px >= dims.height_px)
        throw ValidationError(where() + ": fixation (" + format_number(f.x_px) + ", " +
                              format_number(f.y_px) + ") outside image " +
                              std::to_string(dims.width_px) + "x" + std::to_string(dims.height_px));
    if (f.start_s < 0.0) throw ValidationError(where() + ": negative start_s");
    if (!(f.duration_s > 0.0)) throw ValidationError(where() + ": duration_s must be positive");
}

FixationDataset group_rows(std::vector<Row> rows, ImageDims dims, const WarningSink& warnings) {
    if (dims.width_px <= 0 || dims.height_px <= 0)
        throw ValidationError("image dimensions must be positive");

    FixationDataset ds;
    std::map<std::pair<std::string, std::string>, std::size_t> slot;
    for (auto& r : rows) {
        check_row(r, dims);
        auto& rec = ds.images[r.image_id];
        rec.dims = dims;
        auto key = std::make_pair(r.image_id, r.observer_id);
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, rec.scanpaths.size()).first;
            rec.scanpaths.push_back(ScanPath{r.image_id, r.observer_id, {}});
        }
        rec.scanpaths[it->second].fixations.push_back(r.fixation);
    }

    for (auto& [id, rec] : ds.images) {
        if (dims.width_px != 2 * dims.height_px)
            warn(warnings, "image " + id + ": " + std::to_string(dims.width_px) + "x" +
                               std::to_string(dims.height_px) + " is not a 2:1 equirectangular frame");
        for (auto& sp : rec.scanpaths) {
            auto by_start = [](const Fixation& a, const Fixation& b) { return a.start_s < b.start_s; };
            if (!std::is_sorted(sp.fixations.begin(), sp.fixations.end(), by_start)) {
                std::stable_sort(sp.fixations.begin(), sp.fixations.end(), by_start);
                warn(warnings, "scanpath " + sp.image_id + "/" + sp.observer_id +
                                   ": fixations were out of time order and have been sorted");
            }
            validate_scanpath(sp, dims);
        }
    }
    return ds;
}

std::vector<Row> parse_csv_rows(std::string_view bytes) {
    if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);

    std::vector<Row> rows;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto nl = bytes.find('\n', pos);
        auto line = bytes.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? bytes.size() : nl + 1;
        ++line_no;
        if (line.ends_with('\r')) line.remove_suffix(1);

        if (!saw_header) {
            if (line != fixation_csv_header)
                throw ParseError(line_no, "expected header '" + std::string(fixation_csv_header) + "'");
            saw_header = true;
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        std::array<std::string_view, 6> fields;
        std::size_t n = 0, start = 0;
        while (true) {
            auto comma = line.find(',', start);
            if (n == fields.size()) throw ParseError(line_no, "expected 6 fields, found more");
            fields[n++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (n != fields.size())
            throw ParseError(line_no, "expected 6 fields, found " + std::to_string(n));

        Row r;
        r.image_id = std::string(fields[0]);
        r.observer_id = std::string(fields[1]);
        r.fixation = Fixation{parse_number(fields[2], line_no, "x_px"),
                              parse_number(fields[3], line_no, "y_px"),
                              parse_number(fields[4], line_no, "start_s"),
                              parse_number(fields[5], line_no, "duration_s")};
        r.line = line_no;
        rows.push_back(std::move(r));
    }
    if (!saw_header) throw ParseError(1, "missing header");
    return rows;
}

std::vector<Row> parse_json_rows(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError(0, "fixation JSON must be an array of objects");

    std::vector<Row> rows;
    std::size_t index = 0;
    for (const auto& obj : doc) {
        ++index;
        if (!obj.is_object()) throw ParseError(index, "element is not an object");
        auto str = [&](const char* key) {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_string())
                throw ParseError(index, std::string("missing string field '") + key + "'");
            return it->get<std::string>();
        };
        auto num = [&](const char* key) {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_number())
                throw ParseError(index, std::string("missing numeric field '") + key + "'");
            return it->get<double>();
        };
        rows.push_back(Row{str("image_id"), str("observer_id"),
                           Fixation{num("x_px"), num("y_px"), num("start_s"), num("duration_s")},
                           index});
    }
    return rows;
}

} // namespace

std::size_t FixationDataset::scanpath_count() const {
    std::size_t n = 0;
    for (const auto& [id, rec] : images) n += rec.scanpaths.size();
    return n;
}

std::size_t FixationDataset::fixation_count() const {
    std::size_t n = 0;
    for (const auto& [id, rec] : images)
        for (const auto& sp : rec.scanpaths) n += sp.fixations.size();
    return n;
}

const ImageRecord& FixationDataset::image(const std::string& image_id) const {
    auto it = images.find(image_id);
    if (it == images.end()) throw ValidationError("unknown image '" + image_id + "'");
    return it->second;
}

FixationFormat format_from_path(std::string_view path) {
    return path.ends_with(".json") ? FixationFormat::json : FixationFormat::csv;
}

void validate_scanpath(const ScanPath& sp, ImageDims dims) {
    const std::string who = "scanpath " + sp.image_id + "/" + sp.observer_id;
    if (sp.fixations.empty()) throw ValidationError(who + ": no fixations");
    for (std::size_t i = 0; i < sp.fixations.size(); ++i) {
        const auto& f = sp.fixations[i];
        if (!(f.x_px >= 0.0 && f.x_px < dims.width_px && f.y_px >= 0.0 && f.y_px < dims.height_px))
            throw ValidationError(who + ": fixation " + std::to_string(i) + " outside image bounds");
        if (!(f.start_s >= 0.0)) throw ValidationError(who + ": negative start_s");
        if (!(f.duration_s > 0.0)) throw ValidationError(who + ": duration_s must be positive");
        if (i > 0 && !(sp.fixations[i - 1].start_s < f.start_s))
            throw ValidationError(who + ": duplicate start_s " + format_number(f.start_s));
    }
}

FixationDataset parse_fixations(std::string_view bytes, FixationFormat format, ImageDims dims,
                                const WarningSink& warnings) {
    auto rows = format == FixationFormat::csv ? parse_csv_rows(bytes) : parse_json_rows(bytes);
    return group_rows(std::move(rows), dims, warnings);
}

FixationDataset load_fixations(const std::string& path, ImageDims dims, const WarningSink& warnings) {
    return parse_fixations(read_file(path), format_from_path(path), dims, warnings);
}

std::string serialize_fixations(const FixationDataset& ds, FixationFormat format) {
    if (format == FixationFormat::json) {
        auto rows = nlohmann::json::array();
        for (const auto& [id, rec] : ds.images)
            for (const auto& sp : rec.scanpaths)
                for (const auto& f : sp.fixations)
                    rows.push_back({{"image_id", sp.image_id},
                                    {"observer_id", sp.observer_id},
                                    {"x_px", f.x_px},
                                    {"y_px", f.y_px},
                                    {"start_s", f.start_s},
                                    {"duration_s", f.duration_s}});
        return rows.dump() + "\n";
    }

    std::string out(fixation_csv_header);
    out += '\n';
    for (const auto& [id, rec] : ds.images) {
        for (const auto& sp : rec.scanpaths) {
            for (auto s : {std::string_view(sp.image_id), std::string_view(sp.observer_id)})
                if (s.find_first_of(",\r\n") != std::string_view::npos)
                    throw ValidationError("identifier '" + std::string(s) +
                                          "' cannot be written to CSV");
            for (const auto& f : sp.fixations) {
                out += sp.image_id + ',' + sp.observer_id + ',' + format_number(f.x_px) + ',' +
                       format_number(f.y_px) + ',' + format_number(f.start_s) + ',' +
                       format_number(f.duration_s) + '\n';
            }
        }
    }
    return out;
}

nlohmann::json scanpath_to_json(const ScanPath& sp) {
    auto fixations = nlohmann::json::array();
    for (const auto& f : sp.fixations)
        fixations.push_back(
            {{"x_px", f.x_px}, {"y_px", f.y_px}, {"start_s", f.start_s}, {"duration_s", f.duration_s}});
    return {{"image_id", sp.image_id}, {"observer_id", sp.observer_id}, {"fixations", fixations}};
}

ScanPath scanpath_from_json(const nlohmann::json& j) {
    try {
        ScanPath sp;
        sp.image_id = j.at("image_id").get<std::string>();
        sp.observer_id = j.at("observer_id").get<std::string>();
        for (const auto& f : j.at("fixations"))
            sp.fixations.push_back(Fixation{f.at("x_px").get<double>(), f.at("y_px").get<double>(),
                                            f.at("start_s").get<double>(),
                                            f.at("duration_s").get<double>()});
        return sp;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("malformed scanpath object: ") + e.what());
    }
}

std::string serialize_scanpaths(const std::vector<ScanPath>& scanpaths) {
    auto arr = nlohmann::json::array();
    for (const auto& sp : scanpaths) arr.push_back(scanpath_to_json(sp));
    return arr.dump(1) + "\n";
}

std::vector<ScanPath> parse_scanpaths(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
    std::vector<ScanPath> out;
    if (doc.is_object()) {
        out.push_back(scanpath_from_json(doc));
    } else if (doc.is_array()) {
        for (const auto& j : doc) out.push_back(scanpath_from_json(j));
    } else {
        throw ParseError(0, "scanpath JSON must be an object or an array");
    }
    return out;
}

// --- distributions ---------------------------------------------------------

EmpiricalDistribution::EmpiricalDistribution(std::vector<DistributionAtom> support,
                                             DistributionKind kind, double bin_width_s)
    : support_(std::move(support)), kind_(kind), bin_width_s_(bin_width_s) {
    if (support_.empty()) throw ValidationError("distribution support is empty");
    if (kind_ == DistributionKind::binned_duration && !(bin_width_s_ > 0.0))
        throw ValidationError("duration distribution needs a positive bin width");
    double total = 0.0;
    cumulative_.reserve(support_.size());
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const auto& a = support_[i];
        if (!std::isfinite(a.value) || !(a.probability >= 0.0))
            throw ValidationError("distribution atom has a negative or non-finite entry");
        if (i > 0 && !(support_[i - 1].value < a.value))
            throw ValidationError("distribution support must be strictly increasing");
        total += a.probability;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("distribution probabilities sum to " + format_number(total));
}

double EmpiricalDistribution::mean() const {
    double m = 0.0;
    for (const auto& a : support_) m += a.value * a.probability;
    return m;
}

double EmpiricalDistribution::sample(Rng& rng) const {
    const double target = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    // Rounding can leave the target at the very top; walk back to a positive atom.
    if (i >= support_.size()) i = support_.size() - 1;
    while (support_[i].probability <= 0.0 && i > 0) --i;
    return support_[i].value;
}

EmpiricalDistribution fit_count_distribution(const FixationDataset& ds) {
    std::map<std::size_t, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& [id, rec] : ds.images)
        for (const auto& sp : rec.scanpaths) {
            ++counts[sp.fixations.size()];
            ++total;
        }
    if (total == 0) throw ValidationError("cannot fit a count distribution to an empty dataset");

    std::vector<DistributionAtom> support;
    for (auto [len, n] : counts)
        support.push_back({static_cast<double>(len), static_cast<double>(n) / static_cast<double>(total)});
    return EmpiricalDistribution(std::move(support), DistributionKind::discrete_count);
}

EmpiricalDistribution fit_duration_distribution(const FixationDataset& ds, double bin_width_s) {
    if (!(bin_width_s > 0.0) || !std::isfinite(bin_width_s))
        throw ValidationError("bin width must be positive");
    std::map<long long, std::size_t> bins;
    std::size_t total = 0;
    for (const auto& [id, rec] : ds.images)
        for (const auto& sp : rec.scanpaths)
            for (const auto& f : sp.fixations) {
                // Small slack so values sitting on a bin edge are not split by rounding.
                ++bins[static_cast<long long>(std::floor(f.duration_s / bin_width_s + 1e-9))];
                ++total;
            }
    if (total == 0) throw ValidationError("cannot fit a duration distribution to an empty dataset");

    std::vector<DistributionAtom> support;
    for (auto [bin, n] : bins)
        support.push_back({(static_cast<double>(bin) + 0.5) * bin_width_s,
                           static_cast<double>(n) / static_cast<double>(total)});
    return EmpiricalDistribution(std::move(support), DistributionKind::binned_duration, bin_width_s);
}

nlohmann::json distribution_to_json(const EmpiricalDistribution& d) {
    auto support = nlohmann::json::array();
    for (const auto& a : d.support()) support.push_back({a.value, a.probability});
    nlohmann::json j = {
        {"kind", d.kind() == DistributionKind::discrete_count ? "discrete-count" : "binned-duration"},
        {"support", support}};
    if (d.kind() == DistributionKind::binned_duration) j["bin_width_s"] = d.bin_width_s();
    return j;
}

EmpiricalDistribution distribution_from_json(const nlohmann::json& j) {
    try {
        const auto kind_name = j.at("kind").get<std::string>();
        DistributionKind kind;
        if (kind_name == "discrete-count")
            kind = DistributionKind::discrete_count;
        else if (kind_name == "binned-duration")
            kind = DistributionKind::binned_duration;
        else
            throw ParseError(0, "unknown distribution kind '" + kind_name + "'");
        std::vector<DistributionAtom> support;
        for (const auto& a : j.at("support"))
            support.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        const double width = kind == DistributionKind::binned_duration ? j.at("bin_width_s").get<double>() : 0.0;
        return EmpiricalDistribution(std::move(support), kind, width);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("malformed distribution: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing '" + path + "'");
}

} // namespace salvol
