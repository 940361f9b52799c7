#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpt/util.hpp"

namespace cpt {

// The seven CCS vulnerabilities. Codes 1-7 are stable and serialized.
enum class Vulnerability : int {
    AuthorityHallucination = 1,
    ContextPoisoning = 2,
    GoalMisalignment = 3,
    IdentityConfusion = 4,
    SourceInterference = 5,
    CognitiveLoad = 6,
    AttentionHijacking = 7,
};

constexpr int kVulnerabilityCount = 7;

const std::vector<Vulnerability>& all_vulnerabilities();

// Short id used in files and logs: "CCS1".."CCS7".
std::string vulnerability_id(Vulnerability v);
// Human-readable name: "Authority Hallucination" etc.
std::string vulnerability_name(Vulnerability v);
Vulnerability parse_vulnerability(const std::string& id);

enum class Condition : int { Control = 0, Attack = 1, Mitigated = 2 };

std::string condition_id(Condition c);
Condition parse_condition(const std::string& id);

struct ScenarioId {
    Vulnerability vulnerability = Vulnerability::AuthorityHallucination;
    std::string slug;

    auto operator<=>(const ScenarioId&) const = default;
};

// CCS-4 has two layouts: the published count (2 prompt variants carrying only
// the base prompt, 4 carrying base + mitigated) and a uniform
// control/attack/mitigated grid.
enum class Ccs4Layout { Paper, ThreeCondition };

std::string ccs4_layout_id(Ccs4Layout layout);
Ccs4Layout parse_ccs4_layout(const std::string& id);

// One scenario slot in the canonical suite: its slug and which conditions it
// carries under the paper layout.
struct ScenarioSlot {
    std::string slug;
    std::vector<Condition> paper_conditions;
};

// Canonical scenario registry. Scenario multiplicity per vulnerability is
// fixed by the suite design: CCS1=3 topics, CCS2=1, CCS3=3 scenarios,
// CCS4=6 prompt variants (2 single-variant + 4 double-variant), CCS5=5
// topics, CCS6=1, CCS7=3 scenarios.
const std::vector<ScenarioSlot>& scenario_slots(Vulnerability v);

// Conditions a (vulnerability, slug) cell carries under the given layout.
std::vector<Condition> cell_conditions(const ScenarioId& scenario, Ccs4Layout layout);

struct DecodingParams {
    double temperature = 0.4;
    int max_tokens = 500;

    bool operator==(const DecodingParams&) const = default;
};

struct ModelTarget {
    std::string name;
    std::string endpoint;
    std::string auth_ref;  // env var suffix, resolved as CPT_KEY_<auth_ref>
    DecodingParams decoding;
};

struct TrialSpec {
    std::string model;
    ScenarioId scenario;
    Condition condition = Condition::Control;
    int run_index = 1;  // 1-based
    std::uint64_t seed = 0;

    bool same_cell_key(const TrialSpec& o) const {
        return model == o.model && scenario == o.scenario && condition == o.condition &&
               run_index == o.run_index;
    }
};

struct Message {
    std::string role;
    std::string text;

    bool operator==(const Message&) const = default;
};

enum class ProviderStatus : int { Ok = 0, Refused = 1, TransportError = 2, Truncated = 3 };

std::string provider_status_id(ProviderStatus s);
ProviderStatus parse_provider_status(const std::string& id);

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct TrialRecord {
    TrialSpec spec;
    std::vector<Message> transcript;  // every request and response turn, in order
    std::string started;
    std::string finished;
    ProviderStatus provider_status = ProviderStatus::Ok;
    std::optional<TokenUsage> usage;
    int retry_count = 0;
};

struct PlanConfig {
    std::uint64_t master_seed = 0;
    int runs_per_cell = 30;
    std::vector<ModelTarget> models;
    std::vector<Vulnerability> vulnerabilities;  // empty means all seven
    Ccs4Layout ccs4_layout = Ccs4Layout::Paper;
};

struct PlanDiagnostic {
    enum class Kind { DuplicateKey, MissingCondition, MissingRunIndex, UnexpectedCondition };
    Kind kind;
    std::string detail;
};

// Expands the suite cross-product in canonical order
// (model, vulnerability, scenario, condition, run_index). Pure: the same
// config and master seed produce a byte-identical spec list.
std::vector<TrialSpec> expand_plan(const PlanConfig& config);

// Structural checks over an expanded (or externally supplied) plan.
// Empty result means well-formed.
std::vector<PlanDiagnostic> validate_plan(const std::vector<TrialSpec>& specs,
                                          Ccs4Layout layout = Ccs4Layout::Paper);

// Per-spec seed: stable hash of (master_seed, model, scenario, condition,
// run_index), so mock runs are reproducible and resumable cell by cell.
std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& model,
                          const ScenarioId& scenario, Condition condition, int run_index);

// JSON serialization (plan config file, plan JSONL lines, trial records).
nlohmann::ordered_json to_json(const DecodingParams& p);
nlohmann::ordered_json to_json(const ModelTarget& m);
nlohmann::ordered_json to_json(const TrialSpec& s);
nlohmann::ordered_json to_json(const TrialRecord& r);
nlohmann::ordered_json to_json(const PlanConfig& c);

DecodingParams decoding_from_json(const nlohmann::json& j);
ModelTarget model_target_from_json(const nlohmann::json& j);
TrialSpec trial_spec_from_json(const nlohmann::json& j);
TrialRecord trial_record_from_json(const nlohmann::json& j);
PlanConfig plan_config_from_json(const nlohmann::json& j);

std::string plan_to_jsonl(const std::vector<TrialSpec>& specs);
std::vector<TrialSpec> plan_from_jsonl(const std::string& content);

}  // namespace cpt
