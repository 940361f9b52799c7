#include "cpt/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "cpt/text.hpp"

namespace cpt {

namespace {

// Replaces {name} placeholders. Built-ins: {claim_N} -> Nth claim statement,
// {distractor_N} -> Nth distractor marker; everything else from vars.
std::string substitute(const std::string& tmpl, const ScenarioEntry& entry) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] != '{') {
            out.push_back(tmpl[i++]);
            continue;
        }
        const std::size_t close = tmpl.find('}', i);
        if (close == std::string::npos) {
            out.push_back(tmpl[i++]);
            continue;
        }
        const std::string name = tmpl.substr(i + 1, close - i - 1);
        const bool plain = !name.empty() &&
                           std::all_of(name.begin(), name.end(), [](unsigned char c) {
                               return std::islower(c) || std::isdigit(c) || c == '_';
                           });
        if (!plain) {  // not a placeholder, keep literal braces
            out.push_back(tmpl[i++]);
            continue;
        }
        std::string value;
        bool resolved = false;
        if (auto it = entry.vars.find(name); it != entry.vars.end()) {
            value = it->second;
            resolved = true;
        } else if (name.rfind("claim_", 0) == 0) {
            const std::size_t n = std::stoul(name.substr(6));
            if (n >= 1 && n <= entry.claims.size()) {
                value = entry.claims[n - 1].statement;
                resolved = true;
            }
        } else if (name.rfind("distractor_", 0) == 0) {
            const std::size_t n = std::stoul(name.substr(11));
            if (n >= 1 && n <= entry.distractor_markers.size()) {
                value = entry.distractor_markers[n - 1];
                resolved = true;
            }
        }
        if (!resolved) {
            throw Error("unresolved template placeholder {" + name + "} in scenario " +
                        entry.id.slug);
        }
        out += value;
        i = close + 1;
    }
    return out;
}

bool has_any_word(const std::string& text, std::initializer_list<const char*> needles) {
    for (const char* n : needles) {
        if (text::contains_word(text, n)) return true;
    }
    return false;
}

GoalTargetSpec goal_target_from_json(const nlohmann::json& j) {
    GoalTargetSpec g;
    g.kind = parse_goal_target_kind(j.at("kind").get<std::string>());
    if (g.kind == GoalTargetKind::WordCount) {
        g.word_count = j.at("value").get<double>();
    } else {
        for (const auto& item : j.at("items")) g.items.push_back(item.get<std::string>());
    }
    return g;
}

nlohmann::ordered_json goal_target_to_json(const GoalTargetSpec& g) {
    nlohmann::ordered_json j;
    j["kind"] = goal_target_kind_id(g.kind);
    if (g.kind == GoalTargetKind::WordCount) {
        j["value"] = g.word_count;
    } else {
        j["items"] = g.items;
    }
    return j;
}

}  // namespace

std::string goal_target_kind_id(GoalTargetKind k) {
    switch (k) {
        case GoalTargetKind::WordCount: return "word_count";
        case GoalTargetKind::RequiredItemSet: return "required_item_set";
        case GoalTargetKind::Ordering: return "ordering";
    }
    throw Error("invalid goal target kind");
}

GoalTargetKind parse_goal_target_kind(const std::string& id) {
    if (id == "word_count") return GoalTargetKind::WordCount;
    if (id == "required_item_set") return GoalTargetKind::RequiredItemSet;
    if (id == "ordering") return GoalTargetKind::Ordering;
    throw Error("unknown goal target kind: " + id);
}

VulnerabilityCorpus ProbeCorpus::parse_file(const nlohmann::json& j) {
    if (!j.contains("schema_version")) throw Error("corpus file missing schema_version");
    if (j.at("schema_version").get<int>() != 1) {
        throw Error("unsupported corpus schema_version");
    }
    VulnerabilityCorpus c;
    c.vulnerability = parse_vulnerability(j.at("vulnerability").get<std::string>());
    c.tfva_preamble = j.at("tfva_preamble").get<std::string>();
    for (const auto& s : j.at("scenarios")) {
        ScenarioEntry e;
        e.id = {c.vulnerability, s.at("slug").get<std::string>()};
        if (s.contains("vars")) {
            for (const auto& [k, v] : s.at("vars").items()) e.vars[k] = v.get<std::string>();
        }
        for (const auto& [cond_name, msgs] : s.at("conditions").items()) {
            const Condition cond = parse_condition(cond_name);
            if (cond == Condition::Mitigated) {
                throw Error("corpus must not store mitigated templates (scenario " + e.id.slug +
                            "); mitigated is derived from attack");
            }
            std::vector<Message> out;
            for (const auto& m : msgs) {
                out.push_back({m.at("role").get<std::string>(), m.at("text").get<std::string>()});
            }
            e.conditions[cond] = std::move(out);
        }
        if (s.contains("claims")) {
            for (const auto& cl : s.at("claims")) {
                ClaimSpec claim;
                claim.claim_id = cl.at("claim_id").get<std::string>();
                claim.statement = cl.at("statement").get<std::string>();
                for (const auto& set : cl.at("required_tokens")) {
                    std::vector<std::string> tokens;
                    for (const auto& t : set) tokens.push_back(t.get<std::string>());
                    claim.required_tokens.push_back(std::move(tokens));
                }
                if (cl.contains("negation_cues")) {
                    for (const auto& n : cl.at("negation_cues")) {
                        claim.negation_cues.push_back(n.get<std::string>());
                    }
                }
                e.claims.push_back(std::move(claim));
            }
        }
        if (s.contains("goal_target")) e.goal_target = goal_target_from_json(s.at("goal_target"));
        if (s.contains("distractor_markers")) {
            for (const auto& d : s.at("distractor_markers")) {
                e.distractor_markers.push_back(d.get<std::string>());
            }
        }
        if (s.contains("turn_script")) {
            for (const auto& [cond_name, turns] : s.at("turn_script").items()) {
                std::vector<std::string> script;
                for (const auto& t : turns) script.push_back(t.get<std::string>());
                e.turn_scripts[parse_condition(cond_name)] = std::move(script);
            }
        }
        c.scenarios.push_back(std::move(e));
    }
    return c;
}

nlohmann::ordered_json to_json(const VulnerabilityCorpus& c) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["vulnerability"] = vulnerability_id(c.vulnerability);
    j["tfva_preamble"] = c.tfva_preamble;
    auto scenarios = nlohmann::ordered_json::array();
    for (const ScenarioEntry& e : c.scenarios) {
        nlohmann::ordered_json s;
        s["slug"] = e.id.slug;
        if (!e.vars.empty()) s["vars"] = e.vars;
        nlohmann::ordered_json conds;
        for (const auto& [cond, msgs] : e.conditions) {
            auto arr = nlohmann::ordered_json::array();
            for (const Message& m : msgs) arr.push_back({{"role", m.role}, {"text", m.text}});
            conds[condition_id(cond)] = std::move(arr);
        }
        s["conditions"] = std::move(conds);
        if (!e.claims.empty()) {
            auto claims = nlohmann::ordered_json::array();
            for (const ClaimSpec& cl : e.claims) {
                claims.push_back({{"claim_id", cl.claim_id},
                                  {"statement", cl.statement},
                                  {"required_tokens", cl.required_tokens},
                                  {"negation_cues", cl.negation_cues}});
            }
            s["claims"] = std::move(claims);
        }
        if (e.goal_target) s["goal_target"] = goal_target_to_json(*e.goal_target);
        if (!e.distractor_markers.empty()) s["distractor_markers"] = e.distractor_markers;
        if (!e.turn_scripts.empty()) {
            nlohmann::ordered_json ts;
            for (const auto& [cond, turns] : e.turn_scripts) ts[condition_id(cond)] = turns;
            s["turn_script"] = std::move(ts);
        }
        scenarios.push_back(std::move(s));
    }
    j["scenarios"] = std::move(scenarios);
    return j;
}

ProbeCorpus ProbeCorpus::load_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    ProbeCorpus corpus;
    for (const fs::path& p : paths) {
        corpus.add(parse_file(nlohmann::json::parse(read_text_file(p.string()))));
    }
    if (corpus.files_.empty()) throw Error("corpus directory has no .json files: " + dir);
    return corpus;
}

void ProbeCorpus::add(VulnerabilityCorpus file) {
    const Vulnerability v = file.vulnerability;
    if (files_.count(v)) throw Error("duplicate corpus file for " + vulnerability_id(v));
    files_.emplace(v, std::move(file));
}

const ScenarioEntry* ProbeCorpus::find(const ScenarioId& id) const {
    auto it = files_.find(id.vulnerability);
    if (it == files_.end()) return nullptr;
    for (const ScenarioEntry& e : it->second.scenarios) {
        if (e.id.slug == id.slug) return &e;
    }
    return nullptr;
}

const std::string* ProbeCorpus::preamble(Vulnerability v) const {
    auto it = files_.find(v);
    return it == files_.end() ? nullptr : &it->second.tfva_preamble;
}

std::string ProbeCorpus::digest() const {
    std::string all;
    for (const auto& [v, file] : files_) {
        all += vulnerability_id(v);
        all += '\n';
        all += to_json(file).dump();
        all += '\n';
    }
    return sha256_hex(all);
}

RenderedProbe render_probe(const TrialSpec& spec, const ProbeCorpus& corpus) {
    const ScenarioEntry* entry = corpus.find(spec.scenario);
    if (!entry) {
        throw Error("missing corpus template for " + vulnerability_id(spec.scenario.vulnerability) +
                    "/" + spec.scenario.slug);
    }
    const Condition base =
        spec.condition == Condition::Mitigated ? Condition::Attack : spec.condition;
    auto cond_it = entry->conditions.find(base);
    if (cond_it == entry->conditions.end()) {
        throw Error("missing " + condition_id(base) + " template for " +
                    vulnerability_id(spec.scenario.vulnerability) + "/" + spec.scenario.slug);
    }

    RenderedProbe probe;
    if (spec.condition == Condition::Mitigated) {
        const std::string* pre = corpus.preamble(spec.scenario.vulnerability);
        if (!pre) {
            throw Error("missing TFVA preamble for " +
                        vulnerability_id(spec.scenario.vulnerability));
        }
        probe.messages.push_back({"system", *pre});
    }
    for (const Message& m : cond_it->second) {
        probe.messages.push_back({m.role, substitute(m.text, *entry)});
    }
    probe.claims = entry->claims;
    probe.goal_target = entry->goal_target;
    probe.distractor_markers = entry->distractor_markers;
    if (auto ts = entry->turn_scripts.find(base); ts != entry->turn_scripts.end()) {
        for (const std::string& turn : ts->second) {
            probe.turn_script.push_back(substitute(turn, *entry));
        }
    }
    return probe;
}

std::vector<CorpusDiagnostic> corpus_lint(const ProbeCorpus& corpus, Ccs4Layout layout) {
    std::vector<CorpusDiagnostic> diags;
    std::set<std::string> claim_ids;

    for (const auto& [v, file] : corpus.files()) {
        const std::string lower = text::to_lower(file.tfva_preamble);
        const bool reasoning = has_any_word(lower, {"think", "reason", "reasoning"});
        const bool verification = has_any_word(lower, {"verify", "check", "cross-check", "confirm"});
        if (!reasoning || !verification) {
            diags.push_back({CorpusDiagnostic::Kind::PreambleClause,
                             vulnerability_id(v) + " preamble lacks a " +
                                 (reasoning ? "verification" : "reasoning-step") + " clause"});
        }

        for (const ScenarioEntry& e : file.scenarios) {
            const std::string where = vulnerability_id(v) + "/" + e.id.slug;

            std::vector<Condition> required;
            try {
                for (Condition c : cell_conditions(e.id, layout)) {
                    if (c != Condition::Mitigated) required.push_back(c);
                }
            } catch (const Error&) {
                // Scenario outside the canonical registry: require the pair.
                required = {Condition::Control, Condition::Attack};
            }
            for (Condition c : required) {
                if (!e.conditions.count(c)) {
                    diags.push_back({CorpusDiagnostic::Kind::MissingCondition,
                                     where + " missing " + condition_id(c) + " template"});
                }
            }

            if (v == Vulnerability::ContextPoisoning) {
                for (const auto& [cond, msgs] : e.conditions) {
                    auto ts = e.turn_scripts.find(cond);
                    const std::size_t n = ts == e.turn_scripts.end() ? 0 : ts->second.size();
                    if (n != 10) {
                        diags.push_back({CorpusDiagnostic::Kind::TurnCount,
                                         where + " " + condition_id(cond) + " turn script has " +
                                             std::to_string(n) + " turns, expected 10"});
                    }
                }
            }

            if (v == Vulnerability::SourceInterference && e.claims.empty()) {
                diags.push_back({CorpusDiagnostic::Kind::NoClaims, where + " has no claims"});
            }

            if ((v == Vulnerability::GoalMisalignment || v == Vulnerability::CognitiveLoad) &&
                !e.goal_target) {
                diags.push_back(
                    {CorpusDiagnostic::Kind::MissingGoalTarget, where + " has no goal_target"});
            }

            for (const ClaimSpec& cl : e.claims) {
                if (!claim_ids.insert(cl.claim_id).second) {
                    diags.push_back({CorpusDiagnostic::Kind::DuplicateClaimId,
                                     "claim_id appears more than once: " + cl.claim_id});
                }
                if (cl.required_tokens.empty() ||
                    std::any_of(cl.required_tokens.begin(), cl.required_tokens.end(),
                                [](const auto& set) { return set.empty(); })) {
                    diags.push_back({CorpusDiagnostic::Kind::EmptyRequiredTokens,
                                     "claim has empty required_tokens: " + cl.claim_id});
                }
            }

            // Placeholders must substitute cleanly for every renderable condition.
            for (const auto& [cond, msgs] : e.conditions) {
                (void)msgs;
                TrialSpec probe_spec;
                probe_spec.model = "lint";
                probe_spec.scenario = e.id;
                probe_spec.condition = cond;
                try {
                    render_probe(probe_spec, corpus);
                } catch (const Error& err) {
                    diags.push_back({CorpusDiagnostic::Kind::BadPlaceholder,
                                     where + ": " + err.what()});
                }
            }
        }
    }
    return diags;
}

}  // namespace cpt
