#include "mvfcm/dataset.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace mvfcm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::none: return "none";
        case Normalization::unit_variance_inv_sqrt_dim: return "unit_variance_inv_sqrt_dim";
        case Normalization::l1_rows: return "l1_rows";
    }
    return "none";
}

Normalization parse_normalization(std::string_view text) {
    if (text == "none") return Normalization::none;
    if (text == "unit_variance_inv_sqrt_dim") return Normalization::unit_variance_inv_sqrt_dim;
    if (text == "l1_rows") return Normalization::l1_rows;
    throw InvalidInput("unknown normalization \"" + std::string(text) + "\"");
}

int MultiViewDataset::num_classes() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
}

void MultiViewDataset::validate() const {
    if (views.empty()) throw InvalidInput("dataset has no views");
    const Index n = views.front().rows();
    if (n < 1) throw InvalidInput("dataset has no objects");
    for (const auto& view : views) {
        if (view.rows() != n) {
            throw InvalidInput("row-count mismatch: view \"" + view.name + "\" has " +
                               std::to_string(view.rows()) + " rows, expected " + std::to_string(n));
        }
        if (view.dim() < 1) throw InvalidInput("view \"" + view.name + "\" has no features");
        if (!view.data.allFinite()) throw InvalidInput("view \"" + view.name + "\" has non-finite entries");
    }
    if (!labels) return;
    if (static_cast<Index>(labels->size()) != n) {
        throw InvalidInput("row-count mismatch: labels have " + std::to_string(labels->size()) +
                           " rows, expected " + std::to_string(n));
    }
    const int classes = num_classes();
    std::vector<bool> seen(static_cast<std::size_t>(std::max(classes, 0)), false);
    for (int label : *labels) {
        if (label < 0) throw InvalidInput("labels not contiguous: negative class id");
        seen[static_cast<std::size_t>(label)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw InvalidInput("labels not contiguous: class ids must cover 0.." + std::to_string(classes - 1));
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_cell(std::string_view cell, const fs::path& path, std::size_t line) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    T value{};
    const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || end != cell.data() + cell.size()) {
        throw InvalidInput("non-numeric cell \"" + std::string(cell) + "\" at " + path.string() + ":" +
                           std::to_string(line));
    }
    return value;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("missing file: " + path.string());
    return in;
}

}  // namespace

RowMatrix read_matrix_csv(const fs::path& path, bool header) {
    auto in = open_input(path);
    std::vector<double> values;
    Index cols = -1;
    Index rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header && line_no == 1) continue;
        if (trim(line).empty()) continue;
        Index count = 0;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            values.push_back(parse_cell<double>(rest.substr(0, comma), path, line_no));
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cols < 0) {
            cols = count;
        } else if (count != cols) {
            throw InvalidInput("ragged row at " + path.string() + ":" + std::to_string(line_no) + " (" +
                               std::to_string(count) + " cells, expected " + std::to_string(cols) + ")");
        }
        ++rows;
    }
    if (rows == 0) throw InvalidInput("empty matrix file: " + path.string());
    RowMatrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.data());
    return m;
}

std::vector<int> read_labels(const fs::path& path, bool header) {
    auto in = open_input(path);
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header && line_no == 1) continue;
        if (trim(line).empty()) continue;
        labels.push_back(parse_cell<int>(line, path, line_no));
    }
    return labels;
}

MultiViewDataset load_manifest(const fs::path& path) {
    auto in = open_input(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput("malformed manifest " + path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        const fs::path candidate(p);
        return candidate.is_absolute() ? candidate : base / candidate;
    };

    MultiViewDataset dataset;
    try {
        dataset.name = doc.value("name", path.stem().string());
        dataset.distance = parse_distance(doc.value("distance", std::string("euclidean")));
        if (!doc.contains("views") || !doc["views"].is_array() || doc["views"].empty()) {
            throw InvalidInput("manifest " + path.string() + " lists no views");
        }
        for (const auto& entry : doc["views"]) {
            ViewMatrix view;
            view.name = entry.value("name", "view" + std::to_string(dataset.views.size()));
            view.normalization = parse_normalization(entry.value("normalization", std::string("none")));
            view.data = read_matrix_csv(resolve(entry.at("path").get<std::string>()), entry.value("header", false));
            dataset.views.push_back(std::move(view));
        }
        if (doc.contains("labels") && !doc["labels"].is_null()) {
            const auto& entry = doc["labels"];
            dataset.labels = read_labels(resolve(entry.at("path").get<std::string>()), entry.value("header", false));
        }
    } catch (const json::exception& e) {
        throw InvalidInput("malformed manifest " + path.string() + ": " + e.what());
    }
    dataset.validate();
    return dataset;
}

ViewMatrix normalize_unit_variance_inv_sqrt_dim(ViewMatrix view) {
    if (view.applied) throw InvalidInput("view \"" + view.name + "\" is already normalized");
    const Index n = view.rows();
    if (n < 2) throw InvalidInput("unit-variance normalization needs at least 2 objects");
    auto& x = view.data;
    const double scale = 1.0 / std::sqrt(static_cast<double>(view.dim()));
    for (Index j = 0; j < x.cols(); ++j) {
        auto column = x.col(j);
        const double mean = column.mean();
        column.array() -= mean;
        const double stddev = std::sqrt(column.squaredNorm() / static_cast<double>(n));
        if (stddev > 0.0) column /= stddev;
        column *= scale;
    }
    view.applied = true;
    return view;
}

ViewMatrix l1_normalize_rows(ViewMatrix view) {
    if (view.applied) throw InvalidInput("view \"" + view.name + "\" is already normalized");
    auto& x = view.data;
    if ((x.array() < 0.0).any()) {
        throw InvalidInput("l1 row normalization of view \"" + view.name + "\" found a negative entry");
    }
    for (Index i = 0; i < x.rows(); ++i) {
        const double norm = x.row(i).sum();
        if (norm > 0.0) x.row(i) /= norm;
    }
    view.applied = true;
    return view;
}

ViewMatrix apply_normalization(ViewMatrix view) {
    switch (view.normalization) {
        case Normalization::unit_variance_inv_sqrt_dim: return normalize_unit_variance_inv_sqrt_dim(std::move(view));
        case Normalization::l1_rows: return l1_normalize_rows(std::move(view));
        case Normalization::none: break;
    }
    if (view.applied) throw InvalidInput("view \"" + view.name + "\" is already normalized");
    view.applied = true;
    return view;
}

MultiViewDataset apply_normalization(MultiViewDataset dataset) {
    for (auto& view : dataset.views) view = apply_normalization(std::move(view));
    return dataset;
}

ViewMatrix concatenate_views(const MultiViewDataset& dataset) {
    dataset.validate();
    const bool all_applied = std::all_of(dataset.views.begin(), dataset.views.end(),
                                         [](const ViewMatrix& v) { return v.applied; });
    const bool all_untagged = std::all_of(dataset.views.begin(), dataset.views.end(), [](const ViewMatrix& v) {
        return v.normalization == Normalization::none;
    });
    if (!all_applied && !all_untagged) {
        throw InvalidInput("concatenation requires every view to be normalized first");
    }

    Index total = 0;
    for (const auto& v : dataset.views) total += v.dim();
    ViewMatrix out;
    out.name = "concatenated";
    out.applied = all_applied;
    out.data.resize(dataset.size(), total);
    Index offset = 0;
    for (const auto& v : dataset.views) {
        out.data.middleCols(offset, v.dim()) = v.data;
        offset += v.dim();
    }
    return out;
}

namespace {

void write_number(std::ostream& out, double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.write(buf, end - buf);
}

void write_csv(const fs::path& path, const RowMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out.put(',');
            write_number(out, m(i, j));
        }
        out.put('\n');
    }
}

}  // namespace

void write_dataset(const MultiViewDataset& dataset, const fs::path& directory) {
    dataset.validate();
    fs::create_directories(directory);
    json manifest;
    manifest["name"] = dataset.name;
    manifest["distance"] = to_string(dataset.distance);
    manifest["views"] = json::array();
    for (std::size_t p = 0; p < dataset.views.size(); ++p) {
        const auto& view = dataset.views[p];
        const std::string file = "view" + std::to_string(p) + ".csv";
        write_csv(directory / file, view.data);
        manifest["views"].push_back({{"name", view.name},
                                     {"path", file},
                                     {"normalization", to_string(view.normalization)},
                                     {"header", false}});
    }
    if (dataset.labels) {
        std::ofstream out(directory / "labels.csv", std::ios::binary);
        for (int label : *dataset.labels) out << label << '\n';
        manifest["labels"] = {{"path", "labels.csv"}, {"header", false}};
    }
    std::ofstream out(directory / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
}

std::string content_hash(const MultiViewDataset& dataset) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    const auto feed = [&](const void* data, std::size_t bytes) { EVP_DigestUpdate(ctx.get(), data, bytes); };
    for (const auto& view : dataset.views) {
        const std::int64_t shape[2] = {view.rows(), view.dim()};
        feed(shape, sizeof(shape));
        feed(view.data.data(), sizeof(double) * static_cast<std::size_t>(view.data.size()));
    }
    if (dataset.labels) {
        const std::int64_t count = static_cast<std::int64_t>(dataset.labels->size());
        feed(&count, sizeof(count));
        feed(dataset.labels->data(), sizeof(int) * dataset.labels->size());
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace mvfcm
