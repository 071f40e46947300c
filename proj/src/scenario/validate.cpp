#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <unordered_map>

#include "trainer/error.hpp"
#include "trainer/scenario.hpp"

namespace trainer {

namespace {

using Code = Diagnostic::Code;

Diagnostic error(Code code, std::string location, std::string message, std::vector<std::string> ids = {}) {
    return Diagnostic{Diagnostic::Severity::Error, code, std::move(location), std::move(message), std::move(ids)};
}

template <typename T>
void check_unique(const std::vector<T>& items, const char* collection, std::vector<Diagnostic>& out) {
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& id = items[i].id;
        auto [it, fresh] = first.emplace(id, i);
        if (!fresh) {
            out.push_back(error(Code::DuplicateId, std::string(collection) + "[" + std::to_string(i) + "].id",
                                "duplicate id '" + id + "' (first defined at index " + std::to_string(it->second) + ")",
                                {id}));
        }
    }
}

// Strongly connected components over step -> prerequisite edges (Tarjan).
// Returns one concrete cycle per non-trivial component, in authored order of its first member.
std::vector<std::vector<std::string>> find_cycles(const Scenario& s) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < s.steps.size(); ++i) index_of.emplace(s.steps[i].id, i);

    std::vector<std::vector<std::size_t>> edges(s.steps.size());
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        for (const auto& p : s.steps[i].prerequisites) {
            if (auto it = index_of.find(p); it != index_of.end()) edges[i].push_back(it->second);
        }
    }

    const std::size_t n = s.steps.size();
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(n, kUnvisited), low(n, 0), component(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, components = 0;

    std::function<void(std::size_t)> connect = [&](std::size_t v) {
        order[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : edges[v]) {
            if (order[w] == kUnvisited) {
                connect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], order[w]);
            }
        }
        if (low[v] == order[v]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                component[w] = components;
            } while (w != v);
            ++components;
        }
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (order[v] == kUnvisited) connect(v);
    }

    std::vector<std::size_t> size(components, 0);
    for (auto c : component) ++size[c];

    std::vector<std::vector<std::string>> cycles;
    std::vector<bool> reported(components, false);
    for (std::size_t v = 0; v < n; ++v) {
        const auto c = component[v];
        if (reported[c]) continue;
        const bool self_loop = std::find(edges[v].begin(), edges[v].end(), v) != edges[v].end();
        if (size[c] < 2 && !self_loop) continue;
        reported[c] = true;

        // Walk inside the component until a node repeats; the repeated suffix is a cycle.
        std::vector<std::size_t> path;
        std::vector<std::size_t> seen_at(n, kUnvisited);
        std::size_t cur = v;
        while (seen_at[cur] == kUnvisited) {
            seen_at[cur] = path.size();
            path.push_back(cur);
            std::size_t next = cur;
            for (auto w : edges[cur]) {
                if (component[w] == c) {
                    next = w;
                    break;
                }
            }
            cur = next;
        }
        std::vector<std::string> ids;
        for (auto i = seen_at[cur]; i < path.size(); ++i) ids.push_back(s.steps[path[i]].id);
        cycles.push_back(std::move(ids));
    }
    return cycles;
}

void check_positive(std::optional<double> v, const std::string& where, std::vector<Diagnostic>& out) {
    if (v && !(*v > 0.0)) out.push_back(error(Code::InvalidValue, where, "torque must be > 0"));
}

void check_action(const Action& action, const std::string& where, std::vector<Diagnostic>& out) {
    auto check_basic = [&](const BasicAction& a, const std::string& at) {
        if (a.kind == ActionKind::Hold && a.min_duration_ms < 0) {
            out.push_back(error(Code::InvalidValue, at, "hold duration must be >= 0"));
        }
    };
    if (const auto* basic = std::get_if<BasicAction>(&action)) {
        check_basic(*basic, where);
        return;
    }
    const auto& c = std::get<CompositeAction>(action);
    if (c.name.empty()) out.push_back(error(Code::InvalidValue, where, "composite action needs a name"));
    if (c.sequence.empty()) out.push_back(error(Code::InvalidValue, where, "composite sequence is empty"));
    for (std::size_t i = 0; i < c.sequence.size(); ++i) {
        check_basic(c.sequence[i], where + ".sequence[" + std::to_string(i) + "]");
    }
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
    std::vector<Diagnostic> out;
    if (s.id.empty()) out.push_back(error(Code::InvalidValue, "id", "scenario id must be non-empty"));

    check_unique(s.parts, "parts", out);
    check_unique(s.tools, "tools", out);
    check_unique(s.stages, "stages", out);
    check_unique(s.steps, "steps", out);

    for (std::size_t i = 0; i < s.parts.size(); ++i) {
        if (s.parts[i].id.empty()) out.push_back(error(Code::InvalidValue, "parts[" + std::to_string(i) + "].id", "empty id"));
    }
    for (std::size_t i = 0; i < s.tools.size(); ++i) {
        const auto where = "tools[" + std::to_string(i) + "]";
        if (s.tools[i].id.empty()) out.push_back(error(Code::InvalidValue, where + ".id", "empty id"));
        check_positive(s.tools[i].torque_nm, where + ".torque_nm", out);
        if (s.tools[i].slot < 0) out.push_back(error(Code::InvalidValue, where + ".slot", "slot must be >= 0"));
    }

    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        const auto& step = s.steps[i];
        const auto where = "steps[" + std::to_string(i) + "]";
        if (step.id.empty()) out.push_back(error(Code::InvalidValue, where + ".id", "empty id"));
        if (!s.find_part(step.target_part)) {
            out.push_back(error(Code::DanglingReference, where + ".part", "unknown part '" + step.target_part + "'",
                                {step.target_part}));
        }
        if (step.required_tool && !s.find_tool(*step.required_tool)) {
            out.push_back(error(Code::DanglingReference, where + ".tool", "unknown tool '" + *step.required_tool + "'",
                                {*step.required_tool}));
        }
        check_positive(step.required_torque_nm, where + ".torque_nm", out);
        if (!s.stages.empty() && !step.stage.empty()) {
            const bool known = std::any_of(s.stages.begin(), s.stages.end(),
                                           [&](const Stage& st) { return st.id == step.stage; });
            if (!known) {
                out.push_back(error(Code::DanglingReference, where + ".stage", "unknown stage '" + step.stage + "'",
                                    {step.stage}));
            }
        }
        for (const auto& p : step.prerequisites) {
            if (!s.find_step(p)) {
                out.push_back(error(Code::DanglingReference, where + ".requires", "unknown step '" + p + "'", {p}));
            }
        }
        check_action(step.action, where + ".action", out);
    }

    for (auto& cycle : find_cycles(s)) {
        std::string chain;
        for (const auto& id : cycle) chain += id + " -> ";
        chain += cycle.front();
        out.push_back(error(Code::Cycle, "steps", "prerequisite cycle: " + chain, std::move(cycle)));
    }
    return out;
}

std::vector<std::string> topological_order(const Scenario& s) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < s.steps.size(); ++i) index_of.emplace(s.steps[i].id, i);

    std::vector<std::size_t> pending(s.steps.size(), 0);
    std::vector<std::vector<std::size_t>> dependents(s.steps.size());
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        for (const auto& p : s.steps[i].prerequisites) {
            auto it = index_of.find(p);
            if (it == index_of.end()) {
                throw ScenarioError(ScenarioError::Kind::Reference, "unknown prerequisite '" + p + "'", {p});
            }
            dependents[it->second].push_back(i);
            ++pending[i];
        }
    }

    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        if (pending[i] == 0) ready.push(i);
    }
    std::vector<std::string> order;
    order.reserve(s.steps.size());
    while (!ready.empty()) {
        auto i = ready.top();
        ready.pop();
        order.push_back(s.steps[i].id);
        for (auto d : dependents[i]) {
            if (--pending[d] == 0) ready.push(d);
        }
    }
    if (order.size() != s.steps.size()) {
        auto cycles = find_cycles(s);
        throw ScenarioError(ScenarioError::Kind::Cycle, "prerequisite graph has a cycle",
                            cycles.empty() ? std::vector<std::string>{} : cycles.front());
    }
    return order;
}

namespace {

constexpr std::string_view kInverseSuffix = "~inverse";

std::string invert_id(const std::string& id) {
    if (id.size() > kInverseSuffix.size() &&
        id.compare(id.size() - kInverseSuffix.size(), kInverseSuffix.size(), kInverseSuffix) == 0) {
        return id.substr(0, id.size() - kInverseSuffix.size());
    }
    return id + std::string(kInverseSuffix);
}

}  // namespace

Scenario invert_scenario(const Scenario& s, const CompositeLibrary& library) {
    Scenario out;
    out.id = invert_id(s.id);
    out.engine_name = s.engine_name;
    out.direction = s.direction == Direction::Assembly ? Direction::Disassembly : Direction::Assembly;
    out.tools = s.tools;
    out.tutorial = s.tutorial;
    out.stages.assign(s.stages.rbegin(), s.stages.rend());

    // The inverse starts where a complete forward run ends.
    out.parts = s.parts;
    for (const auto& id : topological_order(s)) {
        const Step& step = *s.find_step(id);
        for (auto& p : out.parts) {
            if (p.id == step.target_part) p.initial_state = state_after(step, s.direction);
        }
    }

    std::map<std::string, std::set<std::string>> reversed;
    for (const auto& step : s.steps) {
        for (const auto& p : step.prerequisites) reversed[p].insert(step.id);
    }

    for (auto it = s.steps.rbegin(); it != s.steps.rend(); ++it) {
        Step step = *it;
        if (const auto* basic = std::get_if<BasicAction>(&it->action)) {
            step.action = basic->inverse();
        } else {
            step.action = library.invert(std::get<CompositeAction>(it->action));
        }
        step.prerequisites = reversed[it->id];
        out.steps.push_back(std::move(step));
    }
    return out;
}

}  // namespace trainer
