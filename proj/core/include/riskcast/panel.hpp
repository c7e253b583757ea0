#pragma once

#include "riskcast/series.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace riskcast {

/// Maps variable ids onto files; one entry per panel column.
struct PanelManifest {
    struct Entry {
        std::string id;
        std::string path; // relative to the manifest's directory
        std::string frequency;
        Units units = Units::level;
    };
    std::string target_id;
    std::vector<Entry> variables;

    static PanelManifest load(const std::string& path);
};

/// Daily-aligned matrix of every variable on the trading grid. Immutable after
/// construction; all columns have grid length and no gaps.
class VariablePanel {
public:
    VariablePanel() = default;
    VariablePanel(std::vector<Date> dates, std::vector<std::string> ids,
                  std::vector<std::vector<double>> columns, std::string target_id);

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& target_id() const { return target_id_; }
    std::size_t n_vars() const { return ids_.size(); }
    std::size_t n_days() const { return dates_.size(); }

    const std::vector<double>& column(std::size_t var) const { return columns_[var]; }
    const std::vector<double>& column(const std::string& id) const;
    std::size_t index_of(const std::string& id) const;
    std::size_t target_index() const { return target_index_; }
    double at(std::size_t day, std::size_t var) const { return columns_[var][day]; }

    /// Index of the first grid date >= d; n_days() if none.
    std::size_t lower_bound(Date d) const;

private:
    std::vector<Date> dates_;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> columns_;
    std::string target_id_;
    std::size_t target_index_ = 0;
};

/// Aligns every series onto the grid: each cell takes the most recent
/// observation on or before the grid date; series starting after the grid
/// start carry their first value backward to the grid head. A series whose
/// whole span postdates the grid end raises CoverageError.
VariablePanel align_panel(const std::vector<PriceSeries>& series, const std::vector<Date>& grid,
                          const std::string& target_id);

/// Loads every manifest entry and aligns onto the target series' dates.
VariablePanel load_panel(const PanelManifest& manifest, const std::string& base_dir);

} // namespace riskcast
