#include "platekit/datasetgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "platekit/rng.hpp"

namespace platekit {

namespace fs = std::filesystem;

namespace {

// Records grouped per class, each group sorted by (plate, well) so the
// shuffle below is independent of manifest row order.
std::map<std::string, std::vector<PlateRecord>> by_class_sorted(
    const std::vector<PlateRecord>& records) {
    std::map<std::string, std::vector<PlateRecord>> groups;
    for (const PlateRecord& rec : records) groups[rec.class_label].push_back(rec);
    for (auto& [label, vec] : groups) {
        std::sort(vec.begin(), vec.end(), [](const PlateRecord& a, const PlateRecord& b) {
            return std::tie(a.plate_id, a.well) < std::tie(b.plate_id, b.well);
        });
    }
    return groups;
}

// ceil(frac * n) robust to binary representation noise in frac * n.
size_t ceil_fraction(double frac, size_t n) {
    const double v = frac * static_cast<double>(n);
    const double nearest = std::nearbyint(v);
    if (std::abs(v - nearest) < 1e-9 * std::max(1.0, static_cast<double>(n))) {
        return static_cast<size_t>(nearest);
    }
    return static_cast<size_t>(std::ceil(v));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("write failed: " + path);
}

} // namespace

int FoldAssignment::fold_of(const PlateRecord& rec) const {
    auto it = map.find({rec.plate_id, rec.well});
    if (it == map.end()) {
        throw ValidationError("no fold assigned for plate" + std::to_string(rec.plate_id) + "_" +
                              rec.well);
    }
    return it->second;
}

FoldAssignment make_folds(const std::vector<PlateRecord>& records, int k, uint64_t seed) {
    if (k < 2) throw ConfigError("make_folds: k must be >= 2, got " + std::to_string(k));
    FoldAssignment assignment;
    assignment.k = k;
    for (auto& [label, vec] : by_class_sorted(records)) {
        if (static_cast<int>(vec.size()) < k) {
            throw DataError("class `" + label + "` has " + std::to_string(vec.size()) +
                            " records, fewer than k=" + std::to_string(k));
        }
        auto rng = make_rng(derive_seed(seed, "folds:" + label));
        std::shuffle(vec.begin(), vec.end(), rng);
        for (size_t i = 0; i < vec.size(); ++i) {
            assignment.map[{vec[i].plate_id, vec[i].well}] = static_cast<int>(i % k);
        }
    }
    return assignment;
}

std::pair<std::vector<PlateRecord>, std::vector<PlateRecord>>
split_train_valid(const std::vector<PlateRecord>& train_records, double frac, uint64_t seed) {
    if (!(frac > 0.0 && frac < 1.0)) {
        throw ConfigError("split_train_valid: frac must be in (0,1), got " + std::to_string(frac));
    }
    std::vector<PlateRecord> train, valid;
    for (auto& [label, vec] : by_class_sorted(train_records)) {
        auto rng = make_rng(derive_seed(seed, "valid:" + label));
        std::shuffle(vec.begin(), vec.end(), rng);
        const size_t n_valid = ceil_fraction(frac, vec.size());
        if (n_valid >= vec.size()) {
            throw DataError("class `" + label + "` would have no training records after a " +
                            std::to_string(frac) + " validation split of " +
                            std::to_string(vec.size()));
        }
        valid.insert(valid.end(), vec.begin(), vec.begin() + n_valid);
        train.insert(train.end(), vec.begin() + n_valid, vec.end());
    }
    return {std::move(train), std::move(valid)};
}

std::string write_label_file(const std::vector<Annotation>& annos) {
    std::string out;
    char line[128];
    for (const Annotation& a : annos) {
        std::snprintf(line, sizeof(line), "%d %.6f %.6f %.6f %.6f\n", a.class_id, a.box.cx,
                      a.box.cy, a.box.w, a.box.h);
        out += line;
    }
    return out;
}

std::vector<Annotation> read_label_file(const std::string& text, int class_count) {
    std::vector<Annotation> annos;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string tok;
        std::vector<std::string> toks;
        while (fields >> tok) toks.push_back(tok);
        if (toks.empty()) continue; // blank line
        const std::string where = "line " + std::to_string(line_no);
        if (toks.size() != 5) {
            throw DataError(where + ": expected 5 fields, got " + std::to_string(toks.size()));
        }
        Annotation a;
        try {
            size_t pos = 0;
            a.class_id = std::stoi(toks[0], &pos);
            if (pos != toks[0].size()) throw std::invalid_argument("trailing");
            a.box.cx = std::stod(toks[1]);
            a.box.cy = std::stod(toks[2]);
            a.box.w = std::stod(toks[3]);
            a.box.h = std::stod(toks[4]);
        } catch (const std::exception&) {
            throw DataError(where + ": malformed field in `" + line + "`");
        }
        if (a.class_id < 0 || a.class_id >= class_count) {
            throw DataError(where + ": class id " + toks[0] + " outside [0," +
                            std::to_string(class_count) + ")");
        }
        try {
            validate_norm(a.box);
        } catch (const ValidationError& e) {
            throw DataError(where + ": " + e.what());
        }
        annos.push_back(a);
    }
    return annos;
}

void save_label_file(const std::string& path, const std::vector<Annotation>& annos) {
    write_text_file(path, write_label_file(annos));
}

std::vector<Annotation> load_label_file(const std::string& path, int class_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open label file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return read_label_file(buf.str(), class_count);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string write_names_file(const ClassSet& classes) {
    std::string out;
    for (const std::string& name : classes.names()) {
        out += name;
        out += '\n';
    }
    return out;
}

ClassSet read_names_file(const std::string& text) {
    std::vector<std::string> names;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        names.push_back(line);
    }
    return ClassSet(std::move(names));
}

BundleResult write_dataset_bundle(
    const std::vector<PlateRecord>& records, const ClassSet& classes,
    const FoldAssignment& folds, int fold_index, double valid_frac, uint64_t seed,
    const std::map<std::pair<int, std::string>, std::vector<std::string>>& image_paths,
    const std::string& out_dir) {
    if (fold_index < 0 || fold_index >= folds.k) {
        throw ConfigError("fold index " + std::to_string(fold_index) + " outside [0," +
                          std::to_string(folds.k) + ")");
    }

    std::vector<PlateRecord> subset;
    for (const PlateRecord& rec : records) {
        if (classes.contains(rec.class_label)) subset.push_back(rec);
    }

    std::vector<PlateRecord> test_wells, rest;
    for (const PlateRecord& rec : subset) {
        (folds.fold_of(rec) == fold_index ? test_wells : rest).push_back(rec);
    }
    auto [train_wells, valid_wells] =
        split_train_valid(rest, valid_frac, derive_seed(seed, "fold", fold_index));

    auto expand = [&](std::vector<PlateRecord> wells) {
        std::sort(wells.begin(), wells.end(), [](const PlateRecord& a, const PlateRecord& b) {
            return std::tie(a.plate_id, a.well) < std::tie(b.plate_id, b.well);
        });
        std::vector<std::string> paths;
        for (const PlateRecord& rec : wells) {
            auto it = image_paths.find({rec.plate_id, rec.well});
            if (it == image_paths.end() || it->second.empty()) {
                throw DataError("no image paths for plate" + std::to_string(rec.plate_id) + "_" +
                                rec.well);
            }
            paths.insert(paths.end(), it->second.begin(), it->second.end());
        }
        return paths;
    };

    BundleResult result;
    result.splits.train = expand(std::move(train_wells));
    result.splits.valid = expand(std::move(valid_wells));
    result.splits.test = expand(std::move(test_wells));

    fs::create_directories(out_dir);
    DatasetPaths& p = result.paths;
    p.names_file = (fs::path(out_dir) / "classes.names").string();
    p.data_file = (fs::path(out_dir) / "dataset.data").string();
    p.train_list = (fs::path(out_dir) / "train.txt").string();
    p.valid_list = (fs::path(out_dir) / "valid.txt").string();
    p.test_list = (fs::path(out_dir) / "test.txt").string();

    auto join = [](const std::vector<std::string>& lines) {
        std::string text;
        for (const std::string& l : lines) {
            text += l;
            text += '\n';
        }
        return text;
    };
    write_text_file(p.names_file, write_names_file(classes));
    write_text_file(p.train_list, join(result.splits.train));
    write_text_file(p.valid_list, join(result.splits.valid));
    write_text_file(p.test_list, join(result.splits.test));
    std::string data;
    data += "classes=" + std::to_string(classes.size()) + "\n";
    data += "train=" + p.train_list + "\n";
    data += "valid=" + p.valid_list + "\n";
    data += "names=" + p.names_file + "\n";
    write_text_file(p.data_file, data);
    return result;
}

} // namespace platekit
