#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nowcast/config.hpp"
#include "nowcast/dates.hpp"
#include "nowcast/errors.hpp"

namespace nowcast {

// One published survey. Shares are fractions aligned with the configured
// party order and sum to one after ingestion normalization.
struct Poll {
    std::string agency;
    Date published;
    double sample_size = 0.0;
    std::vector<double> shares;
    double rounding_precision = 0.01;
    std::size_t source_index = 0;  // ingestion order, breaks same-day ties per agency
};

struct SelectedPoll {
    Poll poll;
    double weight = 1.0;  // 1 inside the window, 0.5 inside the half-weight extension
};

// Aggregate of the selected polls at one date.
struct PooledSample {
    struct Member {
        std::string agency;
        Date published;
        double weight = 1.0;
    };

    Date as_of;
    std::vector<Member> member_polls;
    std::vector<double> shares;
    double n_eff = 0.0;
    double rounding_precision = 0.01;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

inline double parse_number(const std::string& cell, int line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + cell +
                         "' is not a number");
    }
}

inline double parse_percent(const std::string& cell, int line_no) {
    if (cell.empty()) return 0.0;  // unreported party, mass stays in "others"
    return parse_number(cell, line_no) / 100.0;
}

// Residual-to-others, then exact renormalization. Raw sum was validated to
// lie in [0.95, 1.05] beforehand.
inline void normalize_shares(std::vector<double>& shares, std::size_t others_index) {
    double sum = 0.0;
    for (double s : shares) sum += s;
    if (sum < 1.0) {
        shares[others_index] += 1.0 - sum;
        sum = 0.0;
        for (double s : shares) sum += s;
    }
    for (double& s : shares) s /= sum;
}

inline void validate_raw_row(std::span<const double> shares, double n, int line_no) {
    double sum = 0.0;
    for (double s : shares) {
        if (s < 0.0 || s > 1.0) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": share outside [0, 1]");
        }
        sum += s;
    }
    if (sum < 0.95 || sum > 1.05) {
        throw ValidationError("line " + std::to_string(line_no) + ": row sums to " +
                              std::to_string(sum * 100.0) + "%, outside [95%, 105%]");
    }
    if (!(n > 0.0)) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": sample size must be positive");
    }
}

inline std::vector<Poll> parse_polls_csv(std::istream& in, const ElectionConfig& config) {
    std::string line;
    if (!std::getline(in, line)) throw NoDataError("poll file is empty");
    auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "date" || header[1] != "agency" || header[2] != "n") {
        throw ParseError("line 1: header must start with 'date,agency,n'");
    }
    std::vector<std::size_t> column_party(header.size() - 3);
    for (std::size_t c = 3; c < header.size(); ++c) {
        auto idx = config.index_of(header[c]);
        if (!idx) throw ConfigError("line 1: unknown party column '" + header[c] + "'");
        column_party[c - 3] = *idx;
    }

    std::vector<Poll> polls;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        Poll p;
        try {
            p.published = Date::parse(cells[0]);
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        p.agency = cells[1];
        p.sample_size = parse_number(cells[2], line_no);
        p.shares.assign(config.party_count(), 0.0);
        for (std::size_t c = 3; c < cells.size(); ++c) {
            p.shares[column_party[c - 3]] = parse_percent(cells[c], line_no);
        }
        validate_raw_row(p.shares, p.sample_size, line_no);
        normalize_shares(p.shares, config.others_index());
        p.rounding_precision = config.rounding_precision();
        p.source_index = polls.size();
        polls.push_back(std::move(p));
    }
    return polls;
}

inline std::vector<Poll> parse_polls_json(std::istream& in, const ElectionConfig& config) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("poll file is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("JSON poll file must be an array of objects");

    std::vector<Poll> polls;
    for (std::size_t row = 0; row < j.size(); ++row) {
        const auto& obj = j[row];
        std::string where = "entry " + std::to_string(row + 1);
        if (!obj.is_object()) throw ParseError(where + ": not an object");
        Poll p;
        p.shares.assign(config.party_count(), 0.0);
        p.rounding_precision = config.rounding_precision();
        bool have_date = false, have_agency = false, have_n = false;
        for (const auto& [key, value] : obj.items()) {
            if (key == "date") {
                p.published = Date::parse(value.get<std::string>());
                have_date = true;
            } else if (key == "agency") {
                p.agency = value.get<std::string>();
                have_agency = true;
            } else if (key == "n") {
                p.sample_size = value.get<double>();
                have_n = true;
            } else if (key == "rounding_precision") {
                p.rounding_precision = value.get<double>();
            } else if (auto idx = config.index_of(key)) {
                p.shares[*idx] = value.get<double>() / 100.0;
            } else {
                throw ConfigError(where + ": unknown party field '" + key + "'");
            }
        }
        if (!have_date || !have_agency || !have_n) {
            throw ParseError(where + ": 'date', 'agency' and 'n' are required");
        }
        validate_raw_row(p.shares, p.sample_size, int(row + 1));
        normalize_shares(p.shares, config.others_index());
        p.source_index = polls.size();
        polls.push_back(std::move(p));
    }
    return polls;
}

}  // namespace detail

// Reads polls from CSV (header `date,agency,n,<party>...`, percent columns)
// or a JSON array with the same field names. Returns the polls sorted by
// publication date, newest first.
inline std::vector<Poll> parse_polls(std::istream& in, const ElectionConfig& config) {
    int c = in.peek();
    while (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        in.get();
        c = in.peek();
    }
    std::vector<Poll> polls = (c == '[' || c == '{') ? detail::parse_polls_json(in, config)
                                                     : detail::parse_polls_csv(in, config);
    std::stable_sort(polls.begin(), polls.end(), [](const Poll& a, const Poll& b) {
        return b.published < a.published;
    });
    return polls;
}

// Keeps the most recent poll per agency published on or before `as_of`.
// Weight 1 within `window_days`, 0.5 within the optional half-weight
// extension, dropped beyond that. The weight scales the poll's sample size
// in every downstream formula.
inline std::vector<SelectedPoll> select_window(const std::vector<Poll>& polls, Date as_of,
                                               const PoolingConfig& config) {
    config.validate();
    std::map<std::string, const Poll*> latest;  // keyed by lowercased agency
    for (const auto& poll : polls) {
        if (as_of < poll.published) continue;
        auto& slot = latest[to_lower(poll.agency)];
        if (slot == nullptr || slot->published < poll.published ||
            (slot->published == poll.published && slot->source_index < poll.source_index)) {
            slot = &poll;
        }
    }

    std::vector<SelectedPoll> out;
    for (const auto& [agency, poll] : latest) {
        long age = as_of.days_since(poll->published);
        double weight = 0.0;
        if (age <= config.window_days) {
            weight = 1.0;
        } else if (config.half_weight_window_days && age <= *config.half_weight_window_days) {
            weight = 0.5;
        } else {
            continue;
        }
        out.push_back(SelectedPoll{*poll, weight});
    }
    std::sort(out.begin(), out.end(), [](const SelectedPoll& a, const SelectedPoll& b) {
        if (a.poll.published != b.poll.published) return b.poll.published < a.poll.published;
        return to_lower(a.poll.agency) < to_lower(b.poll.agency);
    });
    return out;
}

// Effective sample size of correlated polls:
//   n_eff = (sum n_i)^2 / (sum_ij rho_ij * sqrt(n_i n_j)), rho_ii = 1.
// This is the sample size whose simple-random-sample proportion estimator
// has the variance of the pooled estimator; the party share cancels.
inline double effective_sample_size(std::span<const double> sizes, double rho) {
    if (sizes.empty()) throw ValidationError("effective_sample_size: no sizes");
    if (rho < 0.0 || rho >= 1.0) throw ValidationError("rho must lie in [0, 1)");
    double total = 0.0, root_total = 0.0;
    for (double n : sizes) {
        if (!(n > 0.0)) throw ValidationError("sample sizes must be positive");
        total += n;
        root_total += std::sqrt(n);
    }
    double cross = root_total * root_total - total;  // sum over i != j of sqrt(n_i n_j)
    return total * total / (total + rho * cross);
}

// Count-weighted aggregation of the selected polls into one pseudo-sample.
inline PooledSample pool(const std::vector<SelectedPoll>& selected, const PoolingConfig& config,
                         Date as_of) {
    if (selected.empty()) throw NoDataError("no polls in window");
    const std::size_t n_parties = selected.front().poll.shares.size();

    PooledSample out;
    out.as_of = as_of;
    out.shares.assign(n_parties, 0.0);
    out.rounding_precision = 0.0;
    std::vector<double> weighted_sizes;
    double total = 0.0;
    for (const auto& sel : selected) {
        double wn = sel.weight * sel.poll.sample_size;
        weighted_sizes.push_back(wn);
        total += wn;
        for (std::size_t p = 0; p < n_parties; ++p) {
            out.shares[p] += wn * sel.poll.shares[p];
        }
        out.member_polls.push_back({sel.poll.agency, sel.poll.published, sel.weight});
        out.rounding_precision = std::max(out.rounding_precision, sel.poll.rounding_precision);
    }
    for (double& s : out.shares) s /= total;
    out.n_eff = effective_sample_size(weighted_sizes, config.rho);
    return out;
}

}  // namespace nowcast
