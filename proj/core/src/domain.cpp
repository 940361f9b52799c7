#include "cpt/domain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cpt {

namespace {

const std::vector<Condition> kAllConditions = {Condition::Control, Condition::Attack,
                                               Condition::Mitigated};
const std::vector<Condition> kAttackOnly = {Condition::Attack};
const std::vector<Condition> kAttackMitigated = {Condition::Attack, Condition::Mitigated};

std::vector<ScenarioSlot> make_slots(std::initializer_list<const char*> slugs) {
    std::vector<ScenarioSlot> out;
    for (const char* s : slugs) out.push_back({s, kAllConditions});
    return out;
}

}  // namespace

const std::vector<Vulnerability>& all_vulnerabilities() {
    static const std::vector<Vulnerability> all = {
        Vulnerability::AuthorityHallucination, Vulnerability::ContextPoisoning,
        Vulnerability::GoalMisalignment,       Vulnerability::IdentityConfusion,
        Vulnerability::SourceInterference,     Vulnerability::CognitiveLoad,
        Vulnerability::AttentionHijacking};
    return all;
}

std::string vulnerability_id(Vulnerability v) {
    return "CCS" + std::to_string(static_cast<int>(v));
}

std::string vulnerability_name(Vulnerability v) {
    switch (v) {
        case Vulnerability::AuthorityHallucination: return "Authority Hallucination";
        case Vulnerability::ContextPoisoning: return "Context Poisoning";
        case Vulnerability::GoalMisalignment: return "Goal Misalignment";
        case Vulnerability::IdentityConfusion: return "Identity Confusion";
        case Vulnerability::SourceInterference: return "Source Interference";
        case Vulnerability::CognitiveLoad: return "Cognitive Load";
        case Vulnerability::AttentionHijacking: return "Attention Hijacking";
    }
    throw Error("invalid vulnerability enum value");
}

Vulnerability parse_vulnerability(const std::string& id) {
    for (Vulnerability v : all_vulnerabilities()) {
        if (vulnerability_id(v) == id) return v;
    }
    throw Error("unknown vulnerability id: " + id);
}

std::string condition_id(Condition c) {
    switch (c) {
        case Condition::Control: return "control";
        case Condition::Attack: return "attack";
        case Condition::Mitigated: return "mitigated";
    }
    throw Error("invalid condition enum value");
}

Condition parse_condition(const std::string& id) {
    if (id == "control") return Condition::Control;
    if (id == "attack") return Condition::Attack;
    if (id == "mitigated") return Condition::Mitigated;
    throw Error("unknown condition: " + id);
}

std::string ccs4_layout_id(Ccs4Layout layout) {
    return layout == Ccs4Layout::Paper ? "paper" : "three_condition";
}

Ccs4Layout parse_ccs4_layout(const std::string& id) {
    if (id == "paper") return Ccs4Layout::Paper;
    if (id == "three_condition") return Ccs4Layout::ThreeCondition;
    throw Error("unknown ccs4_layout: " + id);
}

const std::vector<ScenarioSlot>& scenario_slots(Vulnerability v) {
    // Slugs are listed in lexicographic order; expansion order follows the
    // registry, so plan files diff cleanly.
    static const std::vector<ScenarioSlot> ccs1 =
        make_slots({"dream-forensics", "neural-rootkits", "quantum-therapy"});
    static const std::vector<ScenarioSlot> ccs2 = make_slots({"remote-work"});
    static const std::vector<ScenarioSlot> ccs3 = make_slots({"email", "feedback", "reward"});
    // Paper layout: two prompt variants carry only the base prompt, the
    // remaining four carry base + mitigated.
    static const std::vector<ScenarioSlot> ccs4 = {
        {"attorney", kAttackOnly},          {"detective", kAttackOnly},
        {"financial-advisor", kAttackMitigated}, {"physician", kAttackMitigated},
        {"psychologist", kAttackMitigated}, {"security-auditor", kAttackMitigated}};
    static const std::vector<ScenarioSlot> ccs5 =
        make_slots({"topic1", "topic2", "topic3", "topic4", "topic5"});
    static const std::vector<ScenarioSlot> ccs6 = make_slots({"incident-summary"});
    static const std::vector<ScenarioSlot> ccs7 =
        make_slots({"budget-cut", "outage-triage", "vendor-risk"});

    switch (v) {
        case Vulnerability::AuthorityHallucination: return ccs1;
        case Vulnerability::ContextPoisoning: return ccs2;
        case Vulnerability::GoalMisalignment: return ccs3;
        case Vulnerability::IdentityConfusion: return ccs4;
        case Vulnerability::SourceInterference: return ccs5;
        case Vulnerability::CognitiveLoad: return ccs6;
        case Vulnerability::AttentionHijacking: return ccs7;
    }
    throw Error("invalid vulnerability enum value");
}

std::vector<Condition> cell_conditions(const ScenarioId& scenario, Ccs4Layout layout) {
    if (scenario.vulnerability == Vulnerability::IdentityConfusion &&
        layout == Ccs4Layout::ThreeCondition) {
        return kAllConditions;
    }
    for (const ScenarioSlot& slot : scenario_slots(scenario.vulnerability)) {
        if (slot.slug == scenario.slug) return slot.paper_conditions;
    }
    throw Error("unknown scenario slug for " + vulnerability_id(scenario.vulnerability) + ": " +
                scenario.slug);
}

std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& model,
                          const ScenarioId& scenario, Condition condition, int run_index) {
    std::ostringstream key;
    key << master_seed << '|' << model << '|' << vulnerability_id(scenario.vulnerability) << '|'
        << scenario.slug << '|' << condition_id(condition) << '|' << run_index;
    return fnv1a64(key.str());
}

std::vector<TrialSpec> expand_plan(const PlanConfig& config) {
    if (config.models.empty()) throw Error("expand_plan: at least one model is required");
    if (config.runs_per_cell < 1) throw Error("expand_plan: runs_per_cell must be >= 1");

    std::vector<Vulnerability> vulns =
        config.vulnerabilities.empty() ? all_vulnerabilities() : config.vulnerabilities;
    std::sort(vulns.begin(), vulns.end());
    vulns.erase(std::unique(vulns.begin(), vulns.end()), vulns.end());

    std::set<std::string> model_names;
    for (const ModelTarget& m : config.models) {
        if (!model_names.insert(m.name).second) {
            throw Error("expand_plan: duplicate model name: " + m.name);
        }
    }

    std::vector<TrialSpec> specs;
    for (const std::string& model : model_names) {
        for (Vulnerability v : vulns) {
            for (const ScenarioSlot& slot : scenario_slots(v)) {
                const ScenarioId scenario{v, slot.slug};
                for (Condition c : cell_conditions(scenario, config.ccs4_layout)) {
                    for (int run = 1; run <= config.runs_per_cell; ++run) {
                        TrialSpec s;
                        s.model = model;
                        s.scenario = scenario;
                        s.condition = c;
                        s.run_index = run;
                        s.seed = derive_seed(config.master_seed, model, scenario, c, run);
                        specs.push_back(std::move(s));
                    }
                }
            }
        }
    }
    return specs;
}

std::vector<PlanDiagnostic> validate_plan(const std::vector<TrialSpec>& specs,
                                          Ccs4Layout layout) {
    std::vector<PlanDiagnostic> diags;

    auto key_of = [](const TrialSpec& s) {
        return s.model + "|" + vulnerability_id(s.scenario.vulnerability) + "|" + s.scenario.slug +
               "|" + condition_id(s.condition) + "|" + std::to_string(s.run_index);
    };

    std::set<std::string> seen;
    // (model, scenario, condition) -> run indexes
    std::map<std::string, std::set<int>> cells;
    // (model, scenario) -> conditions present
    std::map<std::pair<std::string, ScenarioId>, std::set<Condition>> cell_cond;

    for (const TrialSpec& s : specs) {
        const std::string key = key_of(s);
        if (!seen.insert(key).second) {
            diags.push_back({PlanDiagnostic::Kind::DuplicateKey, "duplicate key: " + key});
            continue;
        }
        cells[s.model + "|" + vulnerability_id(s.scenario.vulnerability) + "|" + s.scenario.slug +
              "|" + condition_id(s.condition)]
            .insert(s.run_index);
        cell_cond[{s.model, s.scenario}].insert(s.condition);

        if (s.scenario.vulnerability == Vulnerability::IdentityConfusion &&
            layout == Ccs4Layout::Paper && s.condition == Condition::Control) {
            diags.push_back({PlanDiagnostic::Kind::UnexpectedCondition,
                             "CCS4 cell carries a control condition under the paper layout: " + key});
        }
    }

    for (const auto& [cell, runs] : cells) {
        const int max_run = *runs.rbegin();
        for (int r = 1; r <= max_run; ++r) {
            if (!runs.count(r)) {
                diags.push_back({PlanDiagnostic::Kind::MissingRunIndex,
                                 "missing run_index " + std::to_string(r) + " in cell " + cell});
            }
        }
    }

    for (const auto& [key, present] : cell_cond) {
        const auto& [model, scenario] = key;
        for (Condition c : cell_conditions(scenario, layout)) {
            if (!present.count(c)) {
                diags.push_back({PlanDiagnostic::Kind::MissingCondition,
                                 "missing condition " + condition_id(c) + " for " + model + "/" +
                                     vulnerability_id(scenario.vulnerability) + "/" +
                                     scenario.slug});
            }
        }
    }
    return diags;
}

nlohmann::ordered_json to_json(const DecodingParams& p) {
    return {{"temperature", p.temperature}, {"max_tokens", p.max_tokens}};
}

nlohmann::ordered_json to_json(const ModelTarget& m) {
    return {{"name", m.name},
            {"endpoint", m.endpoint},
            {"auth_ref", m.auth_ref},
            {"decoding", to_json(m.decoding)}};
}

nlohmann::ordered_json to_json(const TrialSpec& s) {
    return {{"model", s.model},
            {"vulnerability", vulnerability_id(s.scenario.vulnerability)},
            {"scenario", s.scenario.slug},
            {"condition", condition_id(s.condition)},
            {"run_index", s.run_index},
            {"seed", s.seed}};
}

nlohmann::ordered_json to_json(const TrialRecord& r) {
    nlohmann::ordered_json transcript = nlohmann::ordered_json::array();
    for (const Message& m : r.transcript) {
        transcript.push_back({{"role", m.role}, {"text", m.text}});
    }
    nlohmann::ordered_json j = {{"spec", to_json(r.spec)},
                                {"transcript", std::move(transcript)},
                                {"started", r.started},
                                {"finished", r.finished},
                                {"provider_status", provider_status_id(r.provider_status)},
                                {"retry_count", r.retry_count}};
    if (r.usage) {
        j["usage"] = {{"prompt_tokens", r.usage->prompt_tokens},
                      {"completion_tokens", r.usage->completion_tokens}};
    } else {
        j["usage"] = nullptr;
    }
    return j;
}

nlohmann::ordered_json to_json(const PlanConfig& c) {
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    for (const ModelTarget& m : c.models) models.push_back(to_json(m));
    nlohmann::ordered_json vulns = nlohmann::ordered_json::array();
    for (Vulnerability v : c.vulnerabilities) vulns.push_back(vulnerability_id(v));
    return {{"master_seed", c.master_seed},
            {"runs_per_cell", c.runs_per_cell},
            {"models", std::move(models)},
            {"vulnerabilities", std::move(vulns)},
            {"ccs4_layout", ccs4_layout_id(c.ccs4_layout)}};
}

std::string provider_status_id(ProviderStatus s) {
    switch (s) {
        case ProviderStatus::Ok: return "ok";
        case ProviderStatus::Refused: return "refused";
        case ProviderStatus::TransportError: return "transport_error";
        case ProviderStatus::Truncated: return "truncated";
    }
    throw Error("invalid provider status enum value");
}

ProviderStatus parse_provider_status(const std::string& id) {
    if (id == "ok") return ProviderStatus::Ok;
    if (id == "refused") return ProviderStatus::Refused;
    if (id == "transport_error") return ProviderStatus::TransportError;
    if (id == "truncated") return ProviderStatus::Truncated;
    throw Error("unknown provider status: " + id);
}

DecodingParams decoding_from_json(const nlohmann::json& j) {
    DecodingParams p;
    if (j.contains("temperature")) p.temperature = j.at("temperature").get<double>();
    if (j.contains("max_tokens")) p.max_tokens = j.at("max_tokens").get<int>();
    if (p.temperature < 0.0 || p.temperature > 2.0) {
        throw Error("decoding temperature out of [0,2]");
    }
    if (p.max_tokens < 1) throw Error("max_tokens must be positive");
    return p;
}

ModelTarget model_target_from_json(const nlohmann::json& j) {
    ModelTarget m;
    m.name = j.at("name").get<std::string>();
    if (m.name.empty()) throw Error("model name must be non-empty");
    m.endpoint = j.value("endpoint", std::string{});
    m.auth_ref = j.value("auth_ref", std::string{});
    if (j.contains("decoding")) m.decoding = decoding_from_json(j.at("decoding"));
    if (!m.endpoint.empty() && m.endpoint.rfind("http://", 0) != 0 &&
        m.endpoint.rfind("https://", 0) != 0) {
        throw Error("model endpoint is not a valid URL: " + m.endpoint);
    }
    return m;
}

TrialSpec trial_spec_from_json(const nlohmann::json& j) {
    TrialSpec s;
    s.model = j.at("model").get<std::string>();
    s.scenario.vulnerability = parse_vulnerability(j.at("vulnerability").get<std::string>());
    s.scenario.slug = j.at("scenario").get<std::string>();
    s.condition = parse_condition(j.at("condition").get<std::string>());
    s.run_index = j.at("run_index").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

TrialRecord trial_record_from_json(const nlohmann::json& j) {
    TrialRecord r;
    r.spec = trial_spec_from_json(j.at("spec"));
    for (const auto& m : j.at("transcript")) {
        r.transcript.push_back({m.at("role").get<std::string>(), m.at("text").get<std::string>()});
    }
    r.started = j.value("started", std::string{});
    r.finished = j.value("finished", std::string{});
    r.provider_status = parse_provider_status(j.at("provider_status").get<std::string>());
    r.retry_count = j.value("retry_count", 0);
    if (j.contains("usage") && !j.at("usage").is_null()) {
        TokenUsage u;
        u.prompt_tokens = j.at("usage").value("prompt_tokens", 0);
        u.completion_tokens = j.at("usage").value("completion_tokens", 0);
        r.usage = u;
    }
    return r;
}

PlanConfig plan_config_from_json(const nlohmann::json& j) {
    PlanConfig c;
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    c.runs_per_cell = j.value("runs_per_cell", 30);
    for (const auto& m : j.at("models")) c.models.push_back(model_target_from_json(m));
    if (j.contains("vulnerabilities")) {
        for (const auto& v : j.at("vulnerabilities")) {
            c.vulnerabilities.push_back(parse_vulnerability(v.get<std::string>()));
        }
    }
    if (j.contains("ccs4_layout")) {
        c.ccs4_layout = parse_ccs4_layout(j.at("ccs4_layout").get<std::string>());
    }
    return c;
}

std::string plan_to_jsonl(const std::vector<TrialSpec>& specs) {
    std::string out;
    for (const TrialSpec& s : specs) {
        out += to_json(s).dump();
        out += '\n';
    }
    return out;
}

std::vector<TrialSpec> plan_from_jsonl(const std::string& content) {
    std::vector<TrialSpec> specs;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        specs.push_back(trial_spec_from_json(nlohmann::json::parse(line)));
    }
    return specs;
}

}  // namespace cpt
