#pragma once

#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "drn/measures.hpp"
#include "drn/stats.hpp"
#include "drn/subgroup.hpp"

#include <json.hpp>

namespace drn {

using Json = nlohmann::ordered_json;

inline std::string format_number(double v, int decimals = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// Kruskal-Wallis comparison table: one column per measure, one row per
// sample group, mean ranks in the cells and the significance row underneath.
// ---------------------------------------------------------------------------

struct KWColumn {
    std::string measure;
    std::optional<KWResult> result;  // empty when the column was skipped
    // mean rank per display row; empty when the row had no data for this measure
    std::vector<std::optional<double>> row_mean_ranks;
    std::string warning;
};

struct KWTable {
    std::string title;
    std::vector<std::string> row_labels;  // groups, in display order
    std::vector<KWColumn> columns;
};

inline void write_kw_table_csv(const KWTable& t, std::ostream& out) {
    out << "group";
    for (const auto& c : t.columns) out << ',' << c.measure;
    out << '\n';
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        out << t.row_labels[r];
        for (const auto& c : t.columns) {
            out << ',';
            if (r < c.row_mean_ranks.size() && c.row_mean_ranks[r])
                out << format_number(*c.row_mean_ranks[r]);
        }
        out << '\n';
    }
    out << "Asymp. Sig.";
    for (const auto& c : t.columns) {
        out << ',';
        if (c.result) out << format_number(c.result->p) << significance_stars(c.result->p);
    }
    out << '\n';
}

inline void write_kw_table_markdown(const KWTable& t, std::ostream& out) {
    out << "### " << t.title << "\n\n";
    out << "| |";
    for (const auto& c : t.columns) out << ' ' << c.measure << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        out << "| " << t.row_labels[r] << " |";
        for (const auto& c : t.columns) {
            out << ' ';
            if (r < c.row_mean_ranks.size() && c.row_mean_ranks[r])
                out << format_number(*c.row_mean_ranks[r], 2);
            else
                out << "-";
            out << " |";
        }
        out << '\n';
    }
    out << "| Asymp. Sig. |";
    for (const auto& c : t.columns) {
        out << ' ';
        if (c.result)
            out << format_number(c.result->p, 3) << significance_stars(c.result->p);
        else
            out << "skipped";
        out << " |";
    }
    out << "\n\nNote. Significant difference in rank mean at the 0.01 level denoted \\*\\*, "
           "at the 0.05 level \\*.\n";
    for (const auto& c : t.columns)
        if (!c.warning.empty()) out << "\nWarning (" << c.measure << "): " << c.warning << '\n';
    out << '\n';
}

inline Json kw_result_json(const KWResult& r) {
    return Json{{"h", r.h},
                {"h_corrected", r.h_corrected},
                {"df", r.df},
                {"p", r.p},
                {"stars", significance_stars(r.p)},
                {"n", r.n},
                {"mean_ranks", r.mean_ranks},
                {"group_sizes", r.group_sizes}};
}

inline Json kw_table_json(const KWTable& t) {
    Json cols = Json::array();
    for (const auto& c : t.columns) {
        Json jc{{"measure", c.measure}};
        if (c.result)
            jc["result"] = kw_result_json(*c.result);
        else
            jc["skipped"] = c.warning;
        cols.push_back(jc);
    }
    return Json{{"title", t.title}, {"groups", t.row_labels}, {"columns", cols}};
}

// ---------------------------------------------------------------------------
// Spearman matrix: lower triangle over the six model variables. Cells inside
// one variable family are structurally untested and render as 'x'.
// ---------------------------------------------------------------------------

struct SpearmanCell {
    enum class Kind { Diagonal, Masked, Tested, Skipped };
    Kind kind = Kind::Masked;
    SpearmanResult result;  // valid when Tested
    std::string note;       // reason when Skipped
};

struct SpearmanMatrix {
    std::string title;
    std::vector<std::string> vars;                 // display order
    std::vector<std::vector<SpearmanCell>> cells;  // lower triangle, cells[i][j] for j <= i
};

inline std::string spearman_cell_text(const SpearmanCell& c, int decimals = 3) {
    switch (c.kind) {
        case SpearmanCell::Kind::Diagonal: return "1";
        case SpearmanCell::Kind::Masked: return "x";
        case SpearmanCell::Kind::Skipped: return "n/a";
        case SpearmanCell::Kind::Tested:
            return format_number(c.result.rho, decimals) + c.result.stars;
    }
    return "";
}

inline void write_spearman_matrix_csv(const SpearmanMatrix& m, std::ostream& out) {
    out << "var";
    for (const auto& v : m.vars) out << ',' << v;
    out << '\n';
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        out << m.vars[i];
        for (std::size_t j = 0; j < m.vars.size(); ++j) {
            out << ',';
            if (j <= i) out << spearman_cell_text(m.cells[i][j], 4);
        }
        out << '\n';
    }
}

inline void write_spearman_matrix_markdown(const SpearmanMatrix& m, std::ostream& out) {
    out << "### " << m.title << "\n\n| |";
    for (const auto& v : m.vars) out << ' ' << v << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < m.vars.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        out << "| " << m.vars[i] << " |";
        for (std::size_t j = 0; j < m.vars.size(); ++j) {
            out << ' ' << (j <= i ? spearman_cell_text(m.cells[i][j]) : "") << " |";
        }
        out << '\n';
    }
    out << "\nNote. Correlations significant at the 0.01 level (2-tailed) denoted \\*\\*, at "
           "the 0.05 level \\*. 'x' signifies correlations not tested.\n";
    for (std::size_t i = 0; i < m.vars.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m.cells[i][j].kind == SpearmanCell::Kind::Skipped)
                out << "\nSkipped (" << m.vars[i] << ", " << m.vars[j]
                    << "): " << m.cells[i][j].note << '\n';
    out << '\n';
}

inline Json spearman_matrix_json(const SpearmanMatrix& m) {
    Json cells = Json::array();
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const SpearmanCell& c = m.cells[i][j];
            Json jc{{"row", m.vars[i]}, {"col", m.vars[j]}};
            switch (c.kind) {
                case SpearmanCell::Kind::Masked: jc["tested"] = false; break;
                case SpearmanCell::Kind::Skipped:
                    jc["tested"] = false;
                    jc["skipped"] = c.note;
                    break;
                case SpearmanCell::Kind::Tested:
                    jc["tested"] = true;
                    jc["rho"] = c.result.rho;
                    jc["p"] = c.result.p;
                    jc["stars"] = c.result.stars;
                    jc["n"] = c.result.n;
                    break;
                case SpearmanCell::Kind::Diagonal: continue;
            }
            cells.push_back(jc);
        }
    }
    return Json{{"title", m.title}, {"vars", m.vars}, {"cells", cells}};
}

}  // namespace drn
