#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucplab/anderson.hpp"
#include "ucplab/geometry.hpp"
#include "ucplab/operator.hpp"
#include "ucplab/ucp.hpp"

namespace ucplab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, '.' decimal point, locale-free.
std::string format_double(double v);

using CsvRow = std::vector<std::string>;

/// '\n' line endings, comma separated, no quoting (cells must not contain
/// commas or newlines).
void write_csv(const std::filesystem::path& path, const CsvRow& header,
               const std::vector<CsvRow>& rows);

/// Header + rows; throws IoError on ragged rows or an empty file.
std::pair<CsvRow, std::vector<CsvRow>> read_csv(const std::filesystem::path& path);

nlohmann::json delone_to_json(const DeloneArrangement& a);
DeloneArrangement delone_from_json(const nlohmann::json& j);

/// One JSON metadata line, then row-major little-endian 64-bit floats.
void save_grid_function(const std::filesystem::path& path, const GridFunction& f);
GridFunction load_grid_function(const std::filesystem::path& path);

/// Report tables in the published column layouts.
std::vector<CsvRow> ucp_summary_rows(const UcpSummary& s, std::uint64_t seed);
extern const CsvRow kUcpHeader;

std::vector<CsvRow> wegner_rows(const WegnerTable& t, int L, double E, int n_real);
extern const CsvRow kWegnerHeader;

std::vector<CsvRow> lift_rows(const LiftCurve& c);
extern const CsvRow kLiftHeader;

std::vector<CsvRow> ssf_rows(const SsfRecord& r);
extern const CsvRow kSsfHeader;

}  // namespace ucplab
