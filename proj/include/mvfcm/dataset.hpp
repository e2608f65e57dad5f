#pragma once

#include "mvfcm/common.hpp"
#include "mvfcm/distance.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mvfcm {

enum class Normalization { none, unit_variance_inv_sqrt_dim, l1_rows };

std::string to_string(Normalization n);
Normalization parse_normalization(std::string_view text);

/// One feature representation of the N objects.
struct ViewMatrix {
    RowMatrix data;  ///< N x D
    std::string name;
    Normalization normalization = Normalization::none;
    bool applied = false;

    Index rows() const { return data.rows(); }
    Index dim() const { return data.cols(); }
};

struct MultiViewDataset {
    std::string name;
    std::vector<ViewMatrix> views;
    std::optional<std::vector<int>> labels;
    DistanceKind distance = DistanceKind::squared_euclidean;

    Index size() const { return views.empty() ? 0 : views.front().rows(); }
    int num_views() const { return static_cast<int>(views.size()); }
    /// Number of ground-truth classes, 0 without labels.
    int num_classes() const;

    /// Throws InvalidInput unless P >= 1, N >= 1, all views share N, every
    /// entry is finite and labels (if any) are contiguous from 0.
    void validate() const;
};

/// Reads a JSON manifest and the CSV files it references. Paths inside the
/// manifest are resolved relative to the manifest's directory. Normalization
/// tags are recorded, not applied.
MultiViewDataset load_manifest(const std::filesystem::path& path);

/// Reads a dense CSV matrix. Throws InvalidInput naming the file and line on
/// any non-numeric cell or ragged row.
RowMatrix read_matrix_csv(const std::filesystem::path& path, bool header);
std::vector<int> read_labels(const std::filesystem::path& path, bool header);

/// Centers each column, divides by its population standard deviation (zero
/// variance columns are only centered) and scales everything by 1/sqrt(D).
ViewMatrix normalize_unit_variance_inv_sqrt_dim(ViewMatrix view);

/// Divides each row by its l1 norm. All-zero rows stay zero; negative
/// entries are rejected.
ViewMatrix l1_normalize_rows(ViewMatrix view);

/// Applies the view's own normalization tag (tag `none` just marks it applied).
ViewMatrix apply_normalization(ViewMatrix view);
MultiViewDataset apply_normalization(MultiViewDataset dataset);

/// Stacks all views side by side in manifest order.
ViewMatrix concatenate_views(const MultiViewDataset& dataset);

/// Writes the dataset as a manifest plus one CSV per view (and labels.csv),
/// using each view's normalization tag. Values are written in shortest
/// round-trip form, so loading the result reproduces the matrices exactly.
void write_dataset(const MultiViewDataset& dataset, const std::filesystem::path& directory);

/// Hex SHA-256 over the dataset's shape, values and labels.
std::string content_hash(const MultiViewDataset& dataset);

}  // namespace mvfcm
