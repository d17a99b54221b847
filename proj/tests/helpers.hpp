#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "nowcast/nowcast.hpp"

namespace testutil {

inline nowcast::ElectionConfig config_from_json(const std::string& text) {
    std::istringstream in(text);
    return nowcast::ElectionConfig::load(in);
}

// The 2013 fixture party set: union,spd,greens,fdp,left,pirates,afd,others.
inline nowcast::ElectionConfig config_2013() {
    return config_from_json(R"({
        "parties": [
            {"id": "union"}, {"id": "spd"}, {"id": "greens"}, {"id": "fdp"},
            {"id": "left"}, {"id": "pirates"}, {"id": "afd"},
            {"id": "others", "others": true}
        ],
        "threshold": 0.05,
        "total_seats": 598,
        "rounding_precision": 0.01
    })");
}

inline std::vector<nowcast::Poll> polls_from_text(const std::string& text,
                                                  const nowcast::ElectionConfig& config) {
    std::istringstream in(text);
    return nowcast::parse_polls(in, config);
}

// The survey behind the running example: published 2013-09-20, n = 1995.
inline const char* table1_csv() {
    return "date,agency,n,union,spd,greens,fdp,left,pirates,afd,others\n"
           "2013-09-20,forsa,1995,40,26,10,5,9,2,4,4\n";
}

inline nowcast::PooledSample table1_pooled() {
    auto config = config_2013();
    auto polls = polls_from_text(table1_csv(), config);
    auto selected = nowcast::select_window(polls, nowcast::Date::parse("2013-09-20"),
                                           config.pooling());
    return nowcast::pool(selected, config.pooling(), nowcast::Date::parse("2013-09-20"));
}

}  // namespace testutil
