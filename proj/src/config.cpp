#include "rumorsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rumorsim/error.hpp"

namespace rumorsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Walks one JSON object, remembering which keys were read.
class Reader {
  public:
    Reader(json const& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j.is_object()) {
            throw ConfigError(where() + "expected an object");
        }
    }

    bool has(char const* key) const { return j_.contains(key); }

    json const& raw(char const* key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(char const* key, double fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        auto const& v = raw(key);
        if (!v.is_number()) {
            throw ConfigError(where(key) + "expected a number");
        }
        return v.get<double>();
    }

    std::uint64_t count(char const* key, std::uint64_t fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        auto const& v = raw(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw ConfigError(where(key) + "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string string(char const* key, std::string fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        auto const& v = raw(key);
        if (!v.is_string()) {
            throw ConfigError(where(key) + "expected a string");
        }
        return v.get<std::string>();
    }

    std::array<double, 2> pair(char const* key)
    {
        auto const& v = raw(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(where(key) + "expected [number, number]");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }

    std::vector<std::string> strings(char const* key, std::vector<std::string> fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        auto const& v = raw(key);
        std::vector<std::string> out;
        if (!v.is_array()) {
            throw ConfigError(where(key) + "expected a list of strings");
        }
        for (auto const& s : v) {
            if (!s.is_string()) {
                throw ConfigError(where(key) + "expected a list of strings");
            }
            out.push_back(s.get<std::string>());
        }
        return out;
    }

    Reader child(char const* key) { return Reader(raw(key), path_ + key + "."); }

    std::string where(char const* key = "") const { return "config: " + path_ + key + ": "; }

    void finish() const
    {
        for (auto const& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError("config: unknown key " + path_ + key);
            }
        }
    }

  private:
    json const& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string resolve(std::string const& path, std::filesystem::path const& base_dir)
{
    if (path.empty()) {
        return path;
    }
    std::filesystem::path p(path);
    if (p.is_relative() && !base_dir.empty()) {
        p = base_dir / p;
    }
    return p.lexically_normal().string();
}

NetworkSpec read_network(Reader r, std::filesystem::path const& base_dir)
{
    NetworkSpec n;
    auto const kind = r.string("kind", "hcn");
    if (kind == "hcn") {
        n.kind = NetworkKind::hcn;
    } else if (kind == "random") {
        n.kind = NetworkKind::random;
    } else if (kind == "regular") {
        n.kind = NetworkKind::regular;
    } else if (kind == "file") {
        n.kind = NetworkKind::file;
    } else {
        throw ConfigError(r.where("kind") + "unknown network kind '" + kind + "'");
    }
    n.nodes = r.count("nodes", n.nodes);
    n.m = r.count("m", n.m);
    n.p = r.number("p", n.p);
    n.seed_clique = r.count("seed_clique", 0);
    n.edges = r.count("edges", 0);
    n.k = r.count("k", 0);
    n.path = resolve(r.string("path", ""), base_dir);
    if (r.has("seed")) {
        n.seed = r.count("seed", 0);
    }
    r.finish();
    return n;
}

InitialOpinionSpec read_initial(Reader r, std::filesystem::path const& base_dir)
{
    InitialOpinionSpec s;
    auto const kind = r.string("kind", "uniform");
    if (kind == "uniform") {
        s.kind = InitialOpinionSpec::Kind::uniform;
    } else if (kind == "two_point") {
        s.kind = InitialOpinionSpec::Kind::two_point;
    } else if (kind == "file") {
        s.kind = InitialOpinionSpec::Kind::file;
    } else {
        throw ConfigError(r.where("kind") + "unknown initial opinion kind '" + kind + "'");
    }
    s.low = r.number("low", s.low);
    s.high = r.number("high", s.high);
    if (r.has("values")) {
        s.values = r.pair("values");
    }
    s.weight = r.number("weight", s.weight);
    s.jitter = r.number("jitter", s.jitter);
    s.path = resolve(r.string("path", ""), base_dir);
    if (r.has("seed_group")) {
        auto g = r.child("seed_group");
        SeedGroupSpec sg;
        sg.fraction = g.number("fraction", sg.fraction);
        sg.low = g.number("low", sg.low);
        sg.high = g.number("high", sg.high);
        auto const sel = g.string("selector", "random");
        if (sel == "random") {
            sg.selector = SeedGroupSpec::Selector::random;
        } else if (sel == "top_degree") {
            sg.selector = SeedGroupSpec::Selector::top_degree;
        } else {
            throw ConfigError(g.where("selector") + "expected random or top_degree");
        }
        if (g.has("alpha")) {
            sg.alpha = g.number("alpha", 0.0);
        }
        g.finish();
        s.seed_group = sg;
    }
    r.finish();
    return s;
}

EventSpec read_event(Reader r)
{
    EventSpec e;
    if (r.has("step")) {
        if (r.has("from") || r.has("until")) {
            throw ConfigError(r.where("step") + "use either step or from/until");
        }
        e.from = static_cast<Step>(r.count("step", 0));
        e.until = e.from + 1;
    } else {
        e.from = static_cast<Step>(r.count("from", 0));
        e.until = static_cast<Step>(r.count("until", static_cast<std::uint64_t>(e.from + 1)));
    }
    e.text = r.string("text", "");
    e.score = r.number("score", 0.0);
    auto const audience = r.string("audience", "all");
    if (audience == "all") {
        e.audience = Audience::all;
    } else if (audience == "core") {
        e.audience = Audience::core;
    } else {
        throw ConfigError(r.where("audience") + "expected all or core");
    }
    r.finish();
    return e;
}

InterventionSpec read_intervention(Reader r)
{
    InterventionSpec s;
    auto const kind = r.string("kind", "");
    auto const k = parse_intervention_kind(kind);
    if (!k) {
        throw ConfigError(r.where("kind") + "expected single, continuous or leader_continuous");
    }
    s.kind = *k;
    s.start_step = static_cast<Step>(r.count("start_step", 0));
    s.message = r.string("message", s.message);
    s.message_score = r.number("message_score", s.message_score);
    if (r.has("leader")) {
        auto const& v = r.raw("leader");
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
            s.leader_id = v.get<AgentId>();
        } else if (!(v.is_string() && v.get<std::string>() == "top_degree")) {
            throw ConfigError(r.where("leader") + "expected top_degree or an agent id");
        }
    }
    r.finish();
    return s;
}

}  // namespace

SimulationConfig config_from_json(json const& doc, std::filesystem::path const& base_dir)
{
    SimulationConfig c;
    Reader r(doc, "");
    if (r.has("network")) {
        c.network = read_network(r.child("network"), base_dir);
    }
    c.steps = static_cast<Step>(r.count("steps", static_cast<std::uint64_t>(c.steps)));
    c.seed = r.count("seed", c.seed);
    if (r.has("deffuant")) {
        auto d = r.child("deffuant");
        c.deffuant.base.confidence_bound = d.number("epsilon", c.deffuant.base.confidence_bound);
        c.deffuant.base.convergence_rate = d.number("alpha", c.deffuant.base.convergence_rate);
        if (d.has("epsilon_range")) {
            c.deffuant.epsilon_range = d.pair("epsilon_range");
        }
        if (d.has("alpha_range")) {
            c.deffuant.alpha_range = d.pair("alpha_range");
        }
        d.finish();
    }
    if (r.has("grouping")) {
        auto g = r.child("grouping");
        auto const strategy = g.string("strategy", "adaptive");
        if (strategy == "adaptive") {
            c.strategy = GroupingStrategy::adaptive;
        } else if (strategy == "all_core") {
            c.strategy = GroupingStrategy::all_core;
        } else {
            throw ConfigError(g.where("strategy") + "expected adaptive or all_core");
        }
        c.grouping.beta = g.number("beta", c.grouping.beta);
        c.grouping.threshold = g.number("threshold", c.grouping.threshold);
        c.grouping.min_neighbors = g.count("min_neighbors", c.grouping.min_neighbors);
        c.grouping.max_core = g.count("max_core", c.grouping.max_core);
        g.finish();
    }
    if (r.has("persona")) {
        auto p = r.child("persona");
        c.persona.names = p.strings("names", c.persona.names);
        c.persona.occupations = p.strings("occupations", c.persona.occupations);
        c.persona.age_mean = p.number("age_mean", c.persona.age_mean);
        c.persona.age_stddev = p.number("age_stddev", c.persona.age_stddev);
        c.persona.age_min = static_cast<int>(p.count("age_min", static_cast<std::uint64_t>(c.persona.age_min)));
        c.persona.age_max = static_cast<int>(p.count("age_max", static_cast<std::uint64_t>(c.persona.age_max)));
        p.finish();
    }
    if (r.has("driver")) {
        auto d = r.child("driver");
        auto const kind = d.string("kind", "scripted");
        if (kind == "scripted") {
            c.driver.kind = DriverKind::scripted;
        } else if (kind == "http") {
            c.driver.kind = DriverKind::http;
        } else {
            throw ConfigError(d.where("kind") + "expected scripted or http");
        }
        c.driver.parallelism = d.count("parallelism", c.driver.parallelism);
        if (d.has("scripted")) {
            auto s = d.child("scripted");
            c.driver.scripted.base_window = s.number("base_window", c.driver.scripted.base_window);
            c.driver.scripted.base_rate = s.number("base_rate", c.driver.scripted.base_rate);
            s.finish();
        }
        if (d.has("http")) {
            auto h = d.child("http");
            c.driver.http.base_url = h.string("base_url", "");
            c.driver.http.model = h.string("model", "");
            c.driver.http.timeout_seconds = h.number("timeout_seconds", c.driver.http.timeout_seconds);
            c.driver.http.max_attempts = static_cast<int>(h.count("max_attempts", 3));
            c.driver.http.backoff = std::chrono::milliseconds(h.count("backoff_ms", 500));
            c.driver.http.prompt_dir = resolve(h.string("prompt_dir", ""), base_dir);
            h.finish();
        }
        d.finish();
    }
    if (r.has("memory")) {
        auto m = r.child("memory");
        c.memory.retrieval_k = m.count("retrieval_k", c.memory.retrieval_k);
        c.memory.decay = m.number("decay", c.memory.decay);
        c.memory.reflection_recent = m.count("reflection_recent", c.memory.reflection_recent);
        m.finish();
    }
    c.reflection_period = static_cast<Step>(r.count("reflection_period", static_cast<std::uint64_t>(c.reflection_period)));
    c.event_importance = r.number("event_importance", c.event_importance);
    c.topic = r.string("topic", c.topic);
    if (r.has("initial_opinions")) {
        c.initial = read_initial(r.child("initial_opinions"), base_dir);
    }
    if (r.has("events")) {
        auto const& list = r.raw("events");
        if (!list.is_array()) {
            throw ConfigError("config: events: expected a list");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            c.events.push_back(read_event(Reader(list[i], "events[" + std::to_string(i) + "].")));
        }
    }
    if (r.has("interventions")) {
        auto const& list = r.raw("interventions");
        if (!list.is_array()) {
            throw ConfigError("config: interventions: expected a list");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            c.interventions.push_back(read_intervention(Reader(list[i], "interventions[" + std::to_string(i) + "].")));
        }
    }
    c.checkpoint_every = static_cast<Step>(r.count("checkpoint_every", 0));
    r.finish();
    c.validate();
    return c;
}

SimulationConfig parse_config(std::string_view text, std::filesystem::path const& base_dir)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (json::parse_error const& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(doc, base_dir);
}

SimulationConfig load_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), path.parent_path());
}

namespace {

char const* network_kind_name(NetworkKind k)
{
    switch (k) {
    case NetworkKind::hcn: return "hcn";
    case NetworkKind::random: return "random";
    case NetworkKind::regular: return "regular";
    case NetworkKind::file: return "file";
    }
    return "hcn";
}

ordered_json pair_json(std::array<double, 2> const& p) { return ordered_json::array({p[0], p[1]}); }

ordered_json intervention_json(InterventionSpec const& s)
{
    ordered_json j{{"kind", std::string(to_string(s.kind))},
                   {"start_step", s.start_step},
                   {"message", s.message},
                   {"message_score", s.message_score}};
    if (s.kind == InterventionKind::leader_continuous) {
        j["leader"] = s.leader_id ? ordered_json(*s.leader_id) : ordered_json("top_degree");
    }
    return j;
}

}  // namespace

ordered_json config_to_json(SimulationConfig const& c)
{
    ordered_json net{{"kind", network_kind_name(c.network.kind)},
                     {"nodes", c.network.nodes},
                     {"m", c.network.m},
                     {"p", c.network.p},
                     {"seed_clique", c.network.seed_clique},
                     {"edges", c.network.edges},
                     {"k", c.network.k},
                     {"path", c.network.path}};
    if (c.network.seed) {
        net["seed"] = *c.network.seed;
    }
    ordered_json deff{{"epsilon", c.deffuant.base.confidence_bound}, {"alpha", c.deffuant.base.convergence_rate}};
    if (c.deffuant.epsilon_range) {
        deff["epsilon_range"] = pair_json(*c.deffuant.epsilon_range);
    }
    if (c.deffuant.alpha_range) {
        deff["alpha_range"] = pair_json(*c.deffuant.alpha_range);
    }
    ordered_json init{{"kind", c.initial.kind == InitialOpinionSpec::Kind::uniform     ? "uniform"
                               : c.initial.kind == InitialOpinionSpec::Kind::two_point ? "two_point"
                                                                                       : "file"},
                      {"low", c.initial.low},
                      {"high", c.initial.high},
                      {"values", pair_json(c.initial.values)},
                      {"weight", c.initial.weight},
                      {"jitter", c.initial.jitter},
                      {"path", c.initial.path}};
    if (auto const& g = c.initial.seed_group) {
        init["seed_group"] = ordered_json{
            {"fraction", g->fraction},
            {"low", g->low},
            {"high", g->high},
            {"selector", g->selector == SeedGroupSpec::Selector::random ? "random" : "top_degree"}};
        if (g->alpha) {
            init["seed_group"]["alpha"] = *g->alpha;
        }
    }
    ordered_json events = ordered_json::array();
    for (auto const& e : c.events) {
        events.push_back(ordered_json{{"from", e.from},
                                      {"until", e.until},
                                      {"text", e.text},
                                      {"score", e.score},
                                      {"audience", e.audience == Audience::all ? "all" : "core"}});
    }
    ordered_json interventions = ordered_json::array();
    for (auto const& s : c.interventions) {
        interventions.push_back(intervention_json(s));
    }
    return ordered_json{
        {"network", net},
        {"steps", c.steps},
        {"seed", c.seed},
        {"deffuant", deff},
        {"grouping",
         {{"strategy", c.strategy == GroupingStrategy::adaptive ? "adaptive" : "all_core"},
          {"beta", c.grouping.beta},
          {"threshold", c.grouping.threshold},
          {"min_neighbors", c.grouping.min_neighbors},
          {"max_core", c.grouping.max_core}}},
        {"persona",
         {{"names", c.persona.names},
          {"occupations", c.persona.occupations},
          {"age_mean", c.persona.age_mean},
          {"age_stddev", c.persona.age_stddev},
          {"age_min", c.persona.age_min},
          {"age_max", c.persona.age_max}}},
        {"driver",
         {{"kind", c.driver.kind == DriverKind::scripted ? "scripted" : "http"},
          {"parallelism", c.driver.parallelism},
          {"scripted", {{"base_window", c.driver.scripted.base_window}, {"base_rate", c.driver.scripted.base_rate}}},
          {"http",
           {{"base_url", c.driver.http.base_url},
            {"model", c.driver.http.model},
            {"timeout_seconds", c.driver.http.timeout_seconds},
            {"max_attempts", c.driver.http.max_attempts},
            {"backoff_ms", c.driver.http.backoff.count()},
            {"prompt_dir", c.driver.http.prompt_dir}}}}},
        {"memory",
         {{"retrieval_k", c.memory.retrieval_k},
          {"decay", c.memory.decay},
          {"reflection_recent", c.memory.reflection_recent}}},
        {"reflection_period", c.reflection_period},
        {"event_importance", c.event_importance},
        {"topic", c.topic},
        {"initial_opinions", init},
        {"events", events},
        {"interventions", interventions},
        {"checkpoint_every", c.checkpoint_every},
    };
}

std::uint64_t config_hash(SimulationConfig const& config)
{
    auto j = config_to_json(config);
    j.erase("steps");
    j.erase("interventions");
    j.erase("checkpoint_every");
    j["driver"].erase("parallelism");
    return fnv1a64(j.dump());
}

InterventionSpec parse_intervention_spec(std::string_view text)
{
    auto const at = text.find('@');
    if (at == std::string_view::npos) {
        throw ConfigError("intervention '" + std::string(text) + "': expected kind@start_step");
    }
    InterventionSpec s;
    auto const kind = parse_intervention_kind(text.substr(0, at));
    if (!kind) {
        throw ConfigError("intervention '" + std::string(text) + "': unknown kind");
    }
    s.kind = *kind;
    auto rest = text.substr(at + 1);
    auto const colon = rest.find(':');
    auto const start = std::string(rest.substr(0, colon));
    try {
        std::size_t used = 0;
        long long const v = std::stoll(start, &used);
        if (used != start.size() || v < 0) {
            throw std::invalid_argument(start);
        }
        s.start_step = v;
    } catch (std::exception const&) {
        throw ConfigError("intervention '" + std::string(text) + "': bad start step");
    }
    if (colon == std::string_view::npos) {
        return s;
    }
    std::stringstream opts{std::string(rest.substr(colon + 1))};
    std::string item;
    while (std::getline(opts, item, ',')) {
        auto const eq = item.find('=');
        auto const key = item.substr(0, eq);
        auto const value = eq == std::string::npos ? std::string{} : item.substr(eq + 1);
        try {
            if (key == "score") {
                s.message_score = std::stod(value);
            } else if (key == "message") {
                s.message = value;
            } else if (key == "leader") {
                if (value != "top_degree") {
                    s.leader_id = static_cast<AgentId>(std::stoul(value));
                }
            } else {
                throw ConfigError("unknown option " + key);
            }
        } catch (ConfigError const&) {
            throw ConfigError("intervention '" + std::string(text) + "': unknown option " + key);
        } catch (std::exception const&) {
            throw ConfigError("intervention '" + std::string(text) + "': bad value for " + key);
        }
    }
    return s;
}

}  // namespace rumorsim
