#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hazardqa/stage.hpp"

namespace hazardqa {

enum class RiskLabel { Yes, No };

std::string_view risk_label_name(RiskLabel label);  // "yes" / "no"

/// Reads a yes/no hazard verdict from free text.
///
/// A leading "yes" or "no" decides directly. Otherwise the first sentence
/// is scanned for a hazard keyword (yes, hazard, risk, danger and their
/// inflections); it reads as No when a negator (no, not, without, ...)
/// precedes the keyword and Yes otherwise. Throws UnparsableRisk when no
/// rule fires.
RiskLabel parse_risk(std::string_view text);

/// Fixed stopword list, one token per line.
class Stopwords {
public:
    static Stopwords parse(std::string_view text);
    static const Stopwords& builtin();

    bool contains(std::string_view token) const { return words_.count(std::string(token)) != 0; }
    std::size_t size() const { return words_.size(); }
    const std::string& digest() const { return digest_; }

private:
    std::set<std::string> words_;
    std::string digest_;
};

struct NormalizedAnswer {
    std::vector<std::string> tokens;
    std::string canonical;

    friend bool operator==(const NormalizedAnswer&, const NormalizedAnswer&) = default;
};

/// Lowercase, strip punctuation, split on whitespace, drop stopwords. For
/// the Risk stage the result is exactly ["yes"] or ["no"] via parse_risk.
NormalizedAnswer normalize_answer(std::string_view text, QAStage stage,
                                  const Stopwords& stopwords = Stopwords::builtin());

struct CandidateAnswer {
    std::string variant_label;
    std::string raw_text;
    NormalizedAnswer normalized;
    int priority = 0;  // position in the variant list; 0 is the raw variant
};

struct VoteResult {
    CandidateAnswer winner;
    std::map<std::string, int> tally;  // canonical form -> count, over all candidates
    int k = 1;
    bool tie_broken = false;
};

/// Groups candidates by canonical form and ranks groups by count, then by
/// their lowest member priority. Only the k best groups are considered; the
/// winner is the lowest-priority member of the top group.
/// Throws EmptyCandidates; InvalidArgument for k < 1 or repeated priorities.
VoteResult plurality_vote(const std::vector<CandidateAnswer>& candidates, int k);

}  // namespace hazardqa
