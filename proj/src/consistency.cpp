#include "texeval/consistency.hpp"

#include <algorithm>

#include "texeval/error.hpp"

namespace texeval {

namespace {

double concordance(const std::vector<std::string>& metric, const std::vector<std::string>& human) {
    auto pos = [](const std::vector<std::string>& order, const std::string& m) {
        return std::find(order.begin(), order.end(), m) - order.begin();
    };
    std::size_t pairs = 0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < human.size(); ++i) {
        for (std::size_t j = i + 1; j < human.size(); ++j) {
            ++pairs;
            if (pos(metric, human[i]) < pos(metric, human[j])) ++agree;
        }
    }
    return pairs == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(pairs);
}

}  // namespace

std::vector<std::string> metric_ranking(const Report& report, const std::string& sample_id,
                                        const std::vector<std::string>& models, double alpha) {
    struct Entry {
        std::string model;
        double texeval;
        double ins;
    };
    std::vector<Entry> entries;
    for (const auto& m : models) {
        const ScoreRecord* row = report.find(sample_id, m);
        if (row == nullptr || !row->ok()) {
            throw Error(ErrorCode::InsufficientScores,
                        "no score for model '" + m + "' on sample '" + sample_id + "'");
        }
        entries.push_back({m, texeval(row->score_ins, row->s_raw, alpha), row->score_ins});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.texeval != b.texeval) return a.texeval > b.texeval;
        if (a.ins != b.ins) return a.ins > b.ins;
        return a.model < b.model;
    });
    std::vector<std::string> out;
    for (auto& e : entries) out.push_back(std::move(e.model));
    return out;
}

ConsistencyResult ranking_consistency(const Report& report, std::span<const RankingCase> cases,
                                      double alpha, MatchMode mode) {
    ConsistencyResult result;
    for (const auto& c : cases) {
        const auto metric = metric_ranking(report, c.sample_id, c.human, alpha);
        ++result.cases;
        if (mode == MatchMode::ExactPermutation) {
            result.matches += metric == c.human ? 1.0 : 0.0;
        } else {
            result.matches += concordance(metric, c.human);
        }
    }
    if (result.cases > 0) result.accuracy = result.matches / static_cast<double>(result.cases);
    return result;
}

ConsistencyResult ranking_consistency(const Report& report, const std::vector<SampleRecord>& records,
                                      double alpha, MatchMode mode) {
    std::vector<RankingCase> cases;
    for (const auto& r : records) {
        if (r.human_ranking) cases.push_back({r.sample_id, *r.human_ranking});
    }
    return ranking_consistency(report, cases, alpha, mode);
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    return grid;
}

std::vector<std::pair<double, ConsistencyResult>> alpha_sweep(
    const Report& report, const std::vector<SampleRecord>& records, std::span<const double> grid,
    MatchMode mode) {
    for (double a : grid) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "alpha grid values must lie in [0,1]");
        }
    }
    std::vector<std::pair<double, ConsistencyResult>> curve;
    curve.reserve(grid.size());
    for (double a : grid) curve.emplace_back(a, ranking_consistency(report, records, a, mode));
    return curve;
}

}  // namespace texeval
