#include "ucplab/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ucplab {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvRow& header,
               const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary keeps '\n' on every platform
    if (!out) throw IoError("write_csv: cannot open " + path.string());
    const auto emit = [&](const CsvRow& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw IoError("write_csv: row width mismatch in " + path.string());
        emit(row);
    }
}

std::pair<CsvRow, std::vector<CsvRow>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_csv: cannot open " + path.string());
    std::vector<CsvRow> all;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        CsvRow row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        if (line.back() == ',') row.push_back("");
        all.push_back(std::move(row));
    }
    if (all.empty()) throw IoError("read_csv: empty file " + path.string());
    for (const auto& row : all)
        if (row.size() != all.front().size())
            throw IoError("read_csv: ragged rows in " + path.string());
    CsvRow header = all.front();
    all.erase(all.begin());
    return {std::move(header), std::move(all)};
}

nlohmann::json delone_to_json(const DeloneArrangement& a) {
    nlohmann::json j;
    j["d"] = a.d;
    j["M_tilde"] = a.M_tilde;
    j["M"] = a.M;
    j["delta"] = a.delta;
    j["gamma1"] = nlohmann::json::array();
    for (const auto& [cell, z] : a.gamma1) {
        nlohmann::json entry;
        entry["cell"] = cell;
        entry["point"] = std::vector<double>(z.data(), z.data() + z.size());
        j["gamma1"].push_back(entry);
    }
    j["gamma2"] = nlohmann::json::array();
    for (const auto& z : a.gamma2)
        j["gamma2"].push_back(std::vector<double>(z.data(), z.data() + z.size()));
    return j;
}

DeloneArrangement delone_from_json(const nlohmann::json& j) {
    DeloneArrangement a;
    try {
        a.d = j.at("d").get<int>();
        a.M_tilde = j.at("M_tilde").get<double>();
        a.M = j.at("M").get<int>();
        a.delta = j.at("delta").get<double>();
        for (const auto& entry : j.at("gamma1")) {
            const auto cell = entry.at("cell").get<std::vector<int>>();
            const auto pt = entry.at("point").get<std::vector<double>>();
            a.gamma1[cell] =
                Eigen::Map<const Eigen::VectorXd>(pt.data(), static_cast<Eigen::Index>(pt.size()));
        }
        for (const auto& p : j.at("gamma2")) {
            const auto pt = p.get<std::vector<double>>();
            a.gamma2.push_back(
                Eigen::Map<const Eigen::VectorXd>(pt.data(), static_cast<Eigen::Index>(pt.size())));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("delone_from_json: ") + e.what());
    }
    return a;
}

void save_grid_function(const std::filesystem::path& path, const GridFunction& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_grid_function: cannot open " + path.string());
    nlohmann::json h;
    h["d"] = f.grid.box.d;
    const Eigen::VectorXd c = f.grid.box.center_or_zero();
    h["center"] = std::vector<double>(c.data(), c.data() + c.size());
    h["side"] = f.grid.box.side;
    h["bc"] = to_string(f.grid.box.bc);
    h["n_per_side"] = f.grid.n_per_side;
    h["count"] = f.values.size();
    out << h.dump() << '\n';
    static_assert(std::endian::native == std::endian::little);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(sizeof(double) * f.values.size()));
}

GridFunction load_grid_function(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_grid_function: cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw IoError("load_grid_function: missing header");
    GridFunction f;
    try {
        const auto h = nlohmann::json::parse(header);
        f.grid.box.d = h.at("d").get<int>();
        const auto c = h.at("center").get<std::vector<double>>();
        f.grid.box.center =
            Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
        f.grid.box.side = h.at("side").get<double>();
        f.grid.box.bc = bc_from_string(h.at("bc").get<std::string>());
        f.grid.n_per_side = h.at("n_per_side").get<int>();
        f.values.resize(h.at("count").get<Eigen::Index>());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("load_grid_function: bad header: ") + e.what());
    }
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(double) * f.values.size()));
    if (!in) throw IoError("load_grid_function: truncated payload");
    return f;
}

const CsvRow kUcpHeader = {"L",    "bc",        "eig_idx",         "lambda", "K_V", "ratio",
                           "weak_frac", "c_sfuc_analytic", "T",      "delta", "seed"};

std::vector<CsvRow> ucp_summary_rows(const UcpSummary& s, std::uint64_t seed) {
    std::vector<CsvRow> rows;
    for (const auto& r : s.rows)
        rows.push_back({std::to_string(r.L), to_string(r.bc), std::to_string(r.eig_index),
                        format_double(r.lambda), format_double(r.K_V), format_double(r.ratio),
                        format_double(r.weak_fraction), format_double(r.c_sfuc_analytic),
                        std::to_string(r.T), format_double(r.delta), std::to_string(seed)});
    return rows;
}

const CsvRow kWegnerHeader = {"L",       "E",     "epsilon",     "n_real",      "mean_count",
                              "ci_lo",   "ci_hi", "bound_all_E", "bound_low_E", "slope_fit"};

std::vector<CsvRow> wegner_rows(const WegnerTable& t, int L, double E, int n_real) {
    std::vector<CsvRow> rows;
    for (const auto& r : t.rows)
        rows.push_back({std::to_string(L), format_double(E), format_double(r.epsilon),
                        std::to_string(n_real), format_double(r.mean_count),
                        format_double(r.ci_lo), format_double(r.ci_hi),
                        format_double(r.bound_all_E), format_double(r.bound_low_E),
                        format_double(t.loglog_slope)});
    return rows;
}

const CsvRow kLiftHeader = {"t", "lambda", "hf_lhs", "hf_rhs"};

std::vector<CsvRow> lift_rows(const LiftCurve& c) {
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < c.t.size(); ++i)
        rows.push_back({format_double(c.t[i]), format_double(c.lambda[i]),
                        format_double(c.hf_lhs[i]), format_double(c.hf_rhs[i])});
    return rows;
}

const CsvRow kSsfHeader = {"breakpoint", "xi_right"};

std::vector<CsvRow> ssf_rows(const SsfRecord& r) {
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < r.breakpoints.size(); ++i) {
        const int xi = i < r.xi.size() ? r.xi[i] : 0;
        rows.push_back({format_double(r.breakpoints[i]), std::to_string(xi)});
    }
    return rows;
}

}  // namespace ucplab
