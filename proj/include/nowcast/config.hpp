#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nowcast/errors.hpp"

namespace nowcast {

struct Party {
    std::string id;            // short token, unique, no whitespace / '+' / ':'
    std::string display_name;
};

struct PoolingConfig {
    int window_days = 14;
    std::optional<int> half_weight_window_days{};  // if set, must exceed window_days
    double rho = 0.5;                              // pairwise poll correlation, [0, 1)

    void validate() const {
        if (window_days <= 0) throw ValidationError("window_days must be positive");
        if (half_weight_window_days && *half_weight_window_days <= window_days) {
            throw ValidationError("half_weight_window_days must exceed window_days");
        }
        if (rho < 0.0 || rho >= 1.0) throw ValidationError("rho must lie in [0, 1)");
    }
};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Static description of one election: the party list (with a designated
// "others" pseudo-party that never wins seats), threshold, parliament size,
// pooling parameters and the rounding granularity of published shares.
class ElectionConfig {
  public:
    ElectionConfig(std::vector<Party> parties, std::size_t others_index, double threshold = 0.05,
                   int total_seats = 598, PoolingConfig pooling = {},
                   double rounding_precision = 0.01)
        : parties_(std::move(parties)),
          others_index_(others_index),
          threshold_(threshold),
          total_seats_(total_seats),
          pooling_(pooling),
          rounding_precision_(rounding_precision) {
        validate();
    }

    static ElectionConfig from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("parties") || !j["parties"].is_array()) {
            throw ConfigError("election configuration needs a 'parties' array");
        }
        std::vector<Party> parties;
        std::optional<std::size_t> others;
        for (const auto& pj : j["parties"]) {
            Party p;
            p.id = pj.value("id", std::string{});
            p.display_name = pj.value("display_name", p.id);
            if (pj.value("others", false) || (!others && to_lower(p.id) == "others")) {
                if (pj.value("others", false) && others) {
                    throw ConfigError("more than one party marked as 'others'");
                }
                others = parties.size();
            }
            parties.push_back(std::move(p));
        }
        if (!others) {
            throw ConfigError("no 'others' pseudo-party in configuration");
        }
        PoolingConfig pooling;
        if (j.contains("pooling")) {
            const auto& pj = j["pooling"];
            pooling.window_days = pj.value("window_days", pooling.window_days);
            if (pj.contains("half_weight_window_days") &&
                !pj["half_weight_window_days"].is_null()) {
                pooling.half_weight_window_days = pj["half_weight_window_days"].get<int>();
            }
            pooling.rho = pj.value("rho", pooling.rho);
        }
        return ElectionConfig(std::move(parties), *others, j.value("threshold", 0.05),
                              j.value("total_seats", 598), pooling,
                              j.value("rounding_precision", 0.01));
    }

    static ElectionConfig load(std::istream& in) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("election configuration is not valid JSON: ") +
                             e.what());
        }
        return from_json(j);
    }

    const std::vector<Party>& parties() const { return parties_; }
    std::size_t party_count() const { return parties_.size(); }
    std::size_t others_index() const { return others_index_; }
    double threshold() const { return threshold_; }
    int total_seats() const { return total_seats_; }
    const PoolingConfig& pooling() const { return pooling_; }
    PoolingConfig& pooling() { return pooling_; }
    double rounding_precision() const { return rounding_precision_; }

    std::optional<std::size_t> index_of(std::string_view id) const {
        for (std::size_t i = 0; i < parties_.size(); ++i) {
            if (parties_[i].id == id) return i;
        }
        return std::nullopt;
    }

  private:
    void validate() const {
        if (parties_.empty()) throw ConfigError("party list is empty");
        if (others_index_ >= parties_.size()) throw ConfigError("others index out of range");
        for (std::size_t i = 0; i < parties_.size(); ++i) {
            const std::string& id = parties_[i].id;
            if (id.empty()) throw ConfigError("party id must be non-empty");
            for (char c : id) {
                if (std::isspace(static_cast<unsigned char>(c)) || c == '+' || c == ':') {
                    throw ConfigError("party id '" + id + "' contains a reserved character");
                }
            }
            for (std::size_t k = i + 1; k < parties_.size(); ++k) {
                if (parties_[k].id == id) throw ConfigError("duplicate party id '" + id + "'");
            }
        }
        if (threshold_ < 0.0 || threshold_ >= 1.0) {
            throw ValidationError("threshold must lie in [0, 1)");
        }
        if (total_seats_ < 1) throw ValidationError("total_seats must be at least 1");
        if (rounding_precision_ <= 0.0 || rounding_precision_ > 0.02) {
            throw ValidationError("rounding_precision must lie in (0, 0.02]");
        }
        pooling_.validate();
    }

    std::vector<Party> parties_;
    std::size_t others_index_;
    double threshold_;
    int total_seats_;
    PoolingConfig pooling_;
    double rounding_precision_;
};

}  // namespace nowcast
