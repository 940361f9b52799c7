#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpt/domain.hpp"

namespace cpt {

// A deliberately false statement injected by a probe, plus the token evidence
// needed to decide later whether a response echoed it.
struct ClaimSpec {
    std::string claim_id;
    std::string statement;
    // A claim is echoed when every token of at least one set co-occurs in a
    // sentence window.
    std::vector<std::vector<std::string>> required_tokens;
    std::vector<std::string> negation_cues;
};

enum class GoalTargetKind { WordCount, RequiredItemSet, Ordering };

std::string goal_target_kind_id(GoalTargetKind k);
GoalTargetKind parse_goal_target_kind(const std::string& id);

struct GoalTargetSpec {
    GoalTargetKind kind = GoalTargetKind::WordCount;
    double word_count = 0.0;
    std::vector<std::string> items;  // required_item_set / ordering kinds
};

// One scenario's corpus entry: message templates per stored condition
// (mitigated is always derived, never stored), substitution variables, and
// the scoring metadata carried through to the metric extractors.
struct ScenarioEntry {
    ScenarioId id;
    std::map<std::string, std::string> vars;
    std::map<Condition, std::vector<Message>> conditions;
    std::vector<ClaimSpec> claims;
    std::optional<GoalTargetSpec> goal_target;
    std::vector<std::string> distractor_markers;
    // CCS-2: exactly 10 follow-up user turns per stored condition.
    std::map<Condition, std::vector<std::string>> turn_scripts;
};

struct VulnerabilityCorpus {
    Vulnerability vulnerability = Vulnerability::AuthorityHallucination;
    std::string tfva_preamble;
    std::vector<ScenarioEntry> scenarios;
};

struct CorpusDiagnostic {
    enum class Kind {
        MissingCondition,
        TurnCount,
        NoClaims,
        MissingGoalTarget,
        PreambleClause,
        DuplicateClaimId,
        EmptyRequiredTokens,
        BadPlaceholder,
    };
    Kind kind;
    std::string detail;
};

class ProbeCorpus {
public:
    static ProbeCorpus load_dir(const std::string& dir);
    static VulnerabilityCorpus parse_file(const nlohmann::json& j);

    void add(VulnerabilityCorpus file);

    const ScenarioEntry* find(const ScenarioId& id) const;
    const std::string* preamble(Vulnerability v) const;
    bool has(Vulnerability v) const { return files_.count(v) > 0; }
    const std::map<Vulnerability, VulnerabilityCorpus>& files() const { return files_; }

    // Content digest over the canonical JSON of all loaded files; used by the
    // run manifest to pin the corpus a run was produced with.
    std::string digest() const;

private:
    std::map<Vulnerability, VulnerabilityCorpus> files_;
};

// Fully substituted probe: the messages to send plus the metadata the
// metric extractors need.
struct RenderedProbe {
    std::vector<Message> messages;
    std::vector<ClaimSpec> claims;
    std::optional<GoalTargetSpec> goal_target;
    std::vector<std::string> distractor_markers;
    std::vector<std::string> turn_script;
};

// Pure: fully substitutes the template for (spec.scenario, spec.condition).
// Mitigated output is the TFVA preamble prepended to the attack output.
// Throws on missing templates or unresolved placeholders.
RenderedProbe render_probe(const TrialSpec& spec, const ProbeCorpus& corpus);

std::vector<CorpusDiagnostic> corpus_lint(const ProbeCorpus& corpus,
                                          Ccs4Layout layout = Ccs4Layout::Paper);

nlohmann::ordered_json to_json(const VulnerabilityCorpus& c);

}  // namespace cpt
