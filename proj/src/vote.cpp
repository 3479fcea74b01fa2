#include "hazardqa/vote.hpp"

#include <algorithm>
#include <sstream>

#include "hazardqa/assets.hpp"
#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

// Lowercases and splits into word tokens. Apostrophes are dropped so
// contractions stay one token ("isn't" -> "isnt"); other ASCII punctuation
// and the U+2000..U+203F punctuation block act as separators.
std::vector<std::string> word_tokens(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80) {
            const auto third = static_cast<unsigned char>(text[i + 2]);
            if (third != 0x98 && third != 0x99) {  // U+2018/U+2019 quotes behave like '
                cleaned.push_back(' ');
            }
            i += 2;
            continue;
        }
        if (c == '\'') {
            continue;
        }
        if (c < 0x80) {
            if (std::isalnum(c)) {
                cleaned.push_back(static_cast<char>(std::tolower(c)));
            } else {
                cleaned.push_back(' ');
            }
        } else {
            cleaned.push_back(static_cast<char>(c));
        }
    }
    std::vector<std::string> tokens;
    std::istringstream in(cleaned);
    std::string token;
    while (in >> token) {
        tokens.push_back(token);
    }
    return tokens;
}

bool is_negator(const std::string& t) {
    static const std::set<std::string> kNegators = {
        "no", "not", "none", "nothing", "without", "never", "neither", "nor",
        "isnt", "arent", "wasnt", "werent", "dont", "doesnt", "cannot", "cant",
    };
    return kNegators.count(t) != 0;
}

bool is_hazard_keyword(const std::string& t) {
    static const std::set<std::string> kKeywords = {
        "yes", "hazard", "hazards", "hazardous", "risk", "risks", "risky", "danger", "dangers", "dangerous",
    };
    return kKeywords.count(t) != 0;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

}  // namespace

std::string_view risk_label_name(RiskLabel label) {
    return label == RiskLabel::Yes ? "yes" : "no";
}

RiskLabel parse_risk(std::string_view text) {
    const auto all = word_tokens(text);
    if (all.empty()) {
        throw UnparsableRisk("empty risk answer");
    }
    if (all.front() == "yes") {
        return RiskLabel::Yes;
    }
    if (all.front() == "no") {
        return RiskLabel::No;
    }
    const auto end = text.find_first_of(".!?\n");
    const auto sentence = word_tokens(text.substr(0, end));
    bool negated = false;
    for (const auto& token : sentence) {
        if (is_negator(token)) {
            negated = true;
        } else if (is_hazard_keyword(token)) {
            return negated ? RiskLabel::No : RiskLabel::Yes;
        }
    }
    throw UnparsableRisk("cannot read a hazard verdict from: " + std::string(text.substr(0, 80)));
}

Stopwords Stopwords::parse(std::string_view text) {
    Stopwords out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        out.words_.insert(line.substr(first, last - first + 1));
    }
    out.digest_ = sha256_hex(text);
    return out;
}

const Stopwords& Stopwords::builtin() {
    static const Stopwords words = parse(assets::default_stopwords());
    return words;
}

NormalizedAnswer normalize_answer(std::string_view text, QAStage stage, const Stopwords& stopwords) {
    if (text.empty()) {
        throw InvalidArgument("cannot normalize an empty answer");
    }
    NormalizedAnswer out;
    if (stage == QAStage::Risk) {
        out.tokens = {std::string(risk_label_name(parse_risk(text)))};
    } else {
        for (auto& token : word_tokens(text)) {
            if (!stopwords.contains(token)) {
                out.tokens.push_back(std::move(token));
            }
        }
    }
    out.canonical = join(out.tokens);
    return out;
}

VoteResult plurality_vote(const std::vector<CandidateAnswer>& candidates, int k) {
    if (candidates.empty()) {
        throw EmptyCandidates("plurality vote over zero candidates");
    }
    if (k < 1) {
        throw InvalidArgument("vote k must be >= 1");
    }
    struct Group {
        std::string canonical;
        int count = 0;
        const CandidateAnswer* best = nullptr;  // lowest priority member
    };
    std::map<std::string, Group> by_form;
    std::set<int> priorities;
    for (const auto& candidate : candidates) {
        if (!priorities.insert(candidate.priority).second) {
            throw InvalidArgument("candidate priorities must be unique");
        }
        auto& group = by_form[candidate.normalized.canonical];
        group.canonical = candidate.normalized.canonical;
        ++group.count;
        if (group.best == nullptr || candidate.priority < group.best->priority) {
            group.best = &candidate;
        }
    }

    std::vector<Group> ranked;
    ranked.reserve(by_form.size());
    for (auto& [form, group] : by_form) {
        ranked.push_back(group);
    }
    std::sort(ranked.begin(), ranked.end(), [](const Group& a, const Group& b) {
        if (a.count != b.count) {
            return a.count > b.count;
        }
        return a.best->priority < b.best->priority;
    });
    if (ranked.size() > static_cast<std::size_t>(k)) {
        ranked.resize(static_cast<std::size_t>(k));
    }

    VoteResult result;
    result.winner = *ranked.front().best;
    result.k = k;
    for (const auto& [form, group] : by_form) {
        result.tally[form] = group.count;
    }
    result.tie_broken = by_form.size() > 1 && std::count_if(by_form.begin(), by_form.end(), [&](const auto& kv) {
                            return kv.second.count == ranked.front().count;
                        }) > 1;
    return result;
}

}  // namespace hazardqa
