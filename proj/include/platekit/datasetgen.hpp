#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "platekit/types.hpp"

namespace platekit {

// Well -> fold index; folds partition the records of one manifest.
struct FoldAssignment {
    int k = 0;
    std::map<std::pair<int, std::string>, int> map; // (plate_id, well) -> fold

    int fold_of(const PlateRecord& rec) const;
};

struct SplitLists {
    std::vector<std::string> train;
    std::vector<std::string> valid;
    std::vector<std::string> test;
};

// Stratified k-fold assignment. Within each class, records are sorted by
// (plate, well), shuffled by a class-derived seed and dealt round-robin, so
// per-class fold sizes differ by at most 1 and the result is independent of
// manifest row order. A class with fewer than k records is an error.
FoldAssignment make_folds(const std::vector<PlateRecord>& records, int k, uint64_t seed);

// Per class, ceil(frac * n) records move to the validation side via a seeded
// shuffle. A class whose training side would become empty is an error.
std::pair<std::vector<PlateRecord>, std::vector<PlateRecord>>
split_train_valid(const std::vector<PlateRecord>& train_records, double frac, uint64_t seed);

// Darknet-style label serialization: one `<class_id> <cx> <cy> <w> <h>` line
// per annotation, reals with exactly 6 decimals, input order, LF endings.
std::string write_label_file(const std::vector<Annotation>& annos);
std::vector<Annotation> read_label_file(const std::string& text, int class_count);

// Same, bound to a path. Reading reports errors as `<path>:<line>: ...`.
void save_label_file(const std::string& path, const std::vector<Annotation>& annos);
std::vector<Annotation> load_label_file(const std::string& path, int class_count);

// Names file: one class per line, ClassSet order.
std::string write_names_file(const ClassSet& classes);
ClassSet read_names_file(const std::string& text);

struct DatasetPaths {
    std::string names_file;
    std::string data_file;
    std::string train_list;
    std::string valid_list;
    std::string test_list;
};

// Materialize one experiment/fold: names file, data file and the three list
// files. test = the chosen fold, valid = ceil(frac) of the remainder per
// class, train = the rest. `image_paths` maps a well to its image files (one
// composite, or its four quadrant tiles); all entries of a well land in the
// same split.
struct BundleResult {
    SplitLists splits;
    DatasetPaths paths;
};
BundleResult write_dataset_bundle(
    const std::vector<PlateRecord>& records, const ClassSet& classes,
    const FoldAssignment& folds, int fold_index, double valid_frac, uint64_t seed,
    const std::map<std::pair<int, std::string>, std::vector<std::string>>& image_paths,
    const std::string& out_dir);

} // namespace platekit
