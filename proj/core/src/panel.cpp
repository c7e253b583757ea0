#include "riskcast/panel.hpp"

#include "riskcast/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <utility>

namespace riskcast {

PanelManifest PanelManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest parse failure (" + path + "): " + e.what());
    }
    PanelManifest m;
    try {
        m.target_id = doc.at("target").get<std::string>();
        for (const auto& v : doc.at("variables")) {
            Entry e;
            e.id = v.at("id").get<std::string>();
            e.path = v.at("path").get<std::string>();
            e.frequency = v.value("frequency", "daily");
            e.units = v.value("units", "level") == "rate" ? Units::rate : Units::level;
            m.variables.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest schema failure (" + path + "): " + e.what());
    }
    const bool has_target = std::any_of(m.variables.begin(), m.variables.end(),
                                        [&](const Entry& e) { return e.id == m.target_id; });
    if (!has_target)
        throw IntegrityError("manifest target '" + m.target_id + "' has no variable entry");
    return m;
}

VariablePanel::VariablePanel(std::vector<Date> dates, std::vector<std::string> ids,
                             std::vector<std::vector<double>> columns, std::string target_id)
    : dates_(std::move(dates)), ids_(std::move(ids)), columns_(std::move(columns)),
      target_id_(std::move(target_id)) {
    if (ids_.size() != columns_.size())
        throw InputError("panel: column count does not match id count");
    for (std::size_t v = 0; v < columns_.size(); ++v)
        if (columns_[v].size() != dates_.size())
            throw InputError("panel: column '" + ids_[v] + "' length mismatch");
    const auto it = std::find(ids_.begin(), ids_.end(), target_id_);
    if (it == ids_.end()) throw InputError("panel: target column '" + target_id_ + "' missing");
    target_index_ = static_cast<std::size_t>(it - ids_.begin());
}

const std::vector<double>& VariablePanel::column(const std::string& id) const {
    return columns_[index_of(id)];
}

std::size_t VariablePanel::index_of(const std::string& id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw InputError("panel: unknown variable '" + id + "'");
    return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t VariablePanel::lower_bound(Date d) const {
    return static_cast<std::size_t>(std::lower_bound(dates_.begin(), dates_.end(), d) -
                                    dates_.begin());
}

VariablePanel align_panel(const std::vector<PriceSeries>& series, const std::vector<Date>& grid,
                          const std::string& target_id) {
    if (grid.empty()) throw InputError("align_panel: empty grid");
    std::vector<std::string> ids;
    std::vector<std::vector<double>> columns;
    ids.reserve(series.size());
    columns.reserve(series.size());
    for (const auto& s : series) {
        if (s.empty()) throw InputError("align_panel: series '" + s.id() + "' is empty");
        if (s.front().date > grid.back())
            throw CoverageError("align_panel: series '" + s.id() +
                                "' starts after the grid ends (" + s.front().date.to_string() +
                                ")");
        std::vector<double> col(grid.size());
        std::size_t j = 0; // index of the next observation strictly after the cell date
        for (std::size_t g = 0; g < grid.size(); ++g) {
            while (j < s.size() && !(grid[g] < s[j].date)) ++j;
            // Cells before the first observation carry the earliest known value.
            col[g] = j == 0 ? s.front().value : s[j - 1].value;
        }
        ids.push_back(s.id());
        columns.push_back(std::move(col));
    }
    return VariablePanel(std::vector<Date>(grid), std::move(ids), std::move(columns), target_id);
}

VariablePanel load_panel(const PanelManifest& manifest, const std::string& base_dir) {
    namespace fs = std::filesystem;
    std::vector<PriceSeries> series;
    series.reserve(manifest.variables.size());
    for (const auto& e : manifest.variables) {
        fs::path p(e.path);
        if (p.is_relative()) p = fs::path(base_dir) / p;
        series.push_back(load_price_series(p.string(), CsvSchema{}, e.id, e.units));
    }
    const auto target = std::find_if(series.begin(), series.end(),
                                     [&](const auto& s) { return s.id() == manifest.target_id; });
    return align_panel(series, target->dates(), manifest.target_id);
}

} // namespace riskcast
