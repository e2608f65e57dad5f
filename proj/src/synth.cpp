#include "mvfcm/synth.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace mvfcm {

void SynthSpec::validate() const {
    if (n_per_cluster < 1) throw InvalidInput("need at least one point per cluster");
    if (k < 1) throw InvalidInput("K must be at least 1");
    if (!(separation >= 0.0) || !std::isfinite(separation)) throw InvalidInput("separation must be nonnegative");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be positive");
    if (views.empty()) throw InvalidInput("at least one view is required");
    bool informative = false;
    for (std::size_t p = 0; p < views.size(); ++p) {
        const auto& v = views[p];
        if (v.kind == ViewKind::copy) {
            if (v.copy_of < 0 || static_cast<std::size_t>(v.copy_of) >= p) {
                throw InvalidInput("copy view " + std::to_string(p) + " must reference an earlier view");
            }
        } else if (v.dim < 1) {
            throw InvalidInput("view " + std::to_string(p) + " needs a positive dimension");
        }
        informative = informative || v.kind == ViewKind::informative;
    }
    if (!informative) throw InvalidInput("at least one informative view is required");
}

double NormalStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

MultiViewDataset generate(const SynthSpec& spec) {
    spec.validate();
    const Index n = static_cast<Index>(spec.n_per_cluster) * spec.k;
    NormalStream normal(spec.seed);

    MultiViewDataset dataset;
    dataset.name = "synth-seed" + std::to_string(spec.seed);
    dataset.distance = spec.distance;
    dataset.labels = std::vector<int>(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) (*dataset.labels)[static_cast<std::size_t>(i)] = static_cast<int>(i / spec.n_per_cluster);

    for (std::size_t p = 0; p < spec.views.size(); ++p) {
        const auto& v = spec.views[p];
        ViewMatrix view;
        view.normalization = v.normalization;
        if (v.kind == ViewKind::copy) {
            const auto& source = dataset.views[static_cast<std::size_t>(v.copy_of)];
            view.data = source.data;
            view.name = "copy" + std::to_string(p) + "_of_" + source.name;
        } else {
            view.name = (v.kind == ViewKind::informative ? "informative" : "noise") + std::to_string(p);
            view.data.resize(n, v.dim);
            const double step = spec.separation * spec.sigma / std::sqrt(static_cast<double>(v.dim));
            for (Index i = 0; i < n; ++i) {
                const double offset = v.kind == ViewKind::informative ? step * static_cast<double>(i / spec.n_per_cluster) : 0.0;
                for (Index d = 0; d < v.dim; ++d) view.data(i, d) = offset + spec.sigma * normal.next();
            }
        }
        dataset.views.push_back(std::move(view));
    }
    return dataset;
}

std::vector<SynthView> parse_view_list(std::string_view text, int default_dim) {
    std::vector<SynthView> views;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

        const auto colon = item.find(':');
        const std::string_view kind = item.substr(0, colon);
        int number = default_dim;
        if (colon != std::string_view::npos) {
            const std::string_view digits = item.substr(colon + 1);
            const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), number);
            if (ec != std::errc{} || end != digits.data() + digits.size()) {
                throw InvalidInput("bad view entry \"" + std::string(item) + "\"");
            }
        }
        SynthView view;
        if (kind == "informative") {
            view.dim = number;
        } else if (kind == "noise") {
            view.kind = ViewKind::noise;
            view.dim = number;
        } else if (kind == "copy") {
            if (colon == std::string_view::npos) throw InvalidInput("copy view needs a source index, e.g. copy:0");
            view.kind = ViewKind::copy;
            view.copy_of = number;
        } else {
            throw InvalidInput("unknown view kind \"" + std::string(kind) + "\"");
        }
        views.push_back(view);
    }
    if (views.empty()) throw InvalidInput("empty view list");
    return views;
}

}  // namespace mvfcm
