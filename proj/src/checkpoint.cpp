#include "rumorsim/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_map>

#include "rumorsim/error.hpp"

namespace rumorsim {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'I', 'M', 'C', 'K', 'P', 'T'};

class Writer {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
        }
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void str(std::string const& s)
    {
        u64(s.size());
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void raw(char const* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
    std::vector<unsigned char>& bytes() { return out_; }

  private:
    std::vector<unsigned char> out_;
};

class ByteReader {
  public:
    explicit ByteReader(std::span<unsigned char const> in) : in_(in) {}

    std::uint8_t u8() { return need(1)[0]; }
    std::uint32_t u32()
    {
        auto const* p = need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64()
    {
        auto const* p = need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        }
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string str()
    {
        auto const n = count(1);
        auto const* p = need(n);
        return std::string(reinterpret_cast<char const*>(p), n);
    }
    /// A length prefix, sanity-checked against the bytes left.
    std::size_t count(std::size_t min_item_bytes)
    {
        auto const n = u64();
        if (min_item_bytes > 0 && n > remaining() / min_item_bytes) {
            throw CheckpointError("checkpoint: corrupt length field");
        }
        return static_cast<std::size_t>(n);
    }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

  private:
    unsigned char const* need(std::size_t n)
    {
        if (remaining() < n) {
            throw CheckpointError("checkpoint: truncated");
        }
        auto const* p = in_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::span<unsigned char const> in_;
    std::size_t pos_ = 0;
};

/// Content table: every distinct content pointer, in order of first use.
class ContentIndex {
  public:
    void visit(ContentPtr const& c)
    {
        if (index_.try_emplace(c.get(), order_.size()).second) {
            order_.push_back(c);
        }
    }
    std::uint64_t at(ContentPtr const& c) const { return index_.at(c.get()); }
    std::vector<ContentPtr> const& order() const noexcept { return order_; }

  private:
    std::unordered_map<MemoryContent const*, std::uint64_t> index_;
    std::vector<ContentPtr> order_;
};

void write_persona(Writer& w, Persona const& p)
{
    w.str(p.name);
    w.u8(static_cast<std::uint8_t>(p.gender));
    w.i64(p.age);
    w.str(p.occupation);
    w.u64(p.interests.size());
    for (auto const& s : p.interests) {
        w.str(s);
    }
    for (double t : p.traits.as_array()) {
        w.f64(t);
    }
}

Persona read_persona(ByteReader& r)
{
    Persona p;
    p.name = r.str();
    auto const g = r.u8();
    if (g > 2) {
        throw CheckpointError("checkpoint: bad gender");
    }
    p.gender = static_cast<Gender>(g);
    p.age = static_cast<int>(r.i64());
    p.occupation = r.str();
    auto const n = r.count(8);
    for (std::size_t i = 0; i < n; ++i) {
        p.interests.push_back(r.str());
    }
    p.traits.openness = r.f64();
    p.traits.conscientiousness = r.f64();
    p.traits.extraversion = r.f64();
    p.traits.agreeableness = r.f64();
    p.traits.neuroticism = r.f64();
    return p;
}

void write_record(Writer& w, ContentIndex const& idx, MemoryRecord const& m)
{
    w.u64(idx.at(m.content));
    w.f64(m.importance);
    w.i64(m.timestamp);
    w.u8(static_cast<std::uint8_t>(m.kind));
    w.u64(m.tweet);
    w.u64(m.sequence);
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(Checkpoint const& c)
{
    auto const& s = c.state;
    ContentIndex idx;
    for (auto const& t : s.tweets) {
        idx.visit(t.content);
    }
    for (auto const& store : s.memories) {
        for (auto const& m : store.personal()) {
            idx.visit(m.content);
        }
        for (auto const& m : store.environmental()) {
            idx.visit(m.content);
        }
    }
    for (auto const& inbox : s.pending_texts) {
        for (auto const& m : inbox) {
            idx.visit(m.content);
        }
    }

    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(c.version);
    w.u64(c.config_hash);
    w.str(c.config_json);

    w.i64(s.step);
    w.u64(s.master_seed);
    w.u64(s.next_tweet);
    w.u64(s.driver_calls);

    auto const n = s.graph.node_count();
    w.u64(n);
    auto const edges = s.graph.edges();
    w.u64(edges.size());
    for (auto const& e : edges) {
        w.u32(e.first);
        w.u32(e.second);
    }
    w.u64(s.opinions.size());
    for (double o : s.opinions) {
        w.f64(o);
    }
    w.u64(s.params.size());
    for (auto const& p : s.params) {
        w.f64(p.confidence_bound);
        w.f64(p.convergence_rate);
    }
    w.u64(s.last_core.size());
    for (AgentId id : s.last_core) {
        w.u32(id);
    }
    w.u64(s.personas.size());
    for (auto const& [id, p] : s.personas) {
        w.u32(id);
        write_persona(w, p);
    }

    w.u64(idx.order().size());
    for (auto const& content : idx.order()) {
        w.str(content->text);
        w.u64(content->embedding.size());
        for (float x : content->embedding) {
            w.f32(x);
        }
    }

    w.u64(s.tweets.size());
    for (auto const& t : s.tweets) {
        w.u64(t.id);
        w.u32(t.author);
        w.u64(idx.at(t.content));
        w.f64(t.score);
        w.i64(t.step);
    }

    // Sparse: only agents that ever wrote a memory.
    w.u64(s.memories.size());
    std::uint64_t used = 0;
    for (auto const& store : s.memories) {
        used += store.next_sequence() > 0;
    }
    w.u64(used);
    for (AgentId id = 0; id < s.memories.size(); ++id) {
        auto const& store = s.memories[id];
        if (store.next_sequence() == 0) {
            continue;
        }
        w.u32(id);
        w.u64(store.next_sequence());
        w.u64(store.personal().size());
        for (auto const& m : store.personal()) {
            write_record(w, idx, m);
        }
        w.u64(store.environmental().size());
        for (auto const& m : store.environmental()) {
            write_record(w, idx, m);
        }
    }

    w.u64(s.pending_texts.size());
    std::uint64_t inboxes = 0;
    for (auto const& inbox : s.pending_texts) {
        inboxes += !inbox.empty();
    }
    w.u64(inboxes);
    for (AgentId id = 0; id < s.pending_texts.size(); ++id) {
        auto const& inbox = s.pending_texts[id];
        if (inbox.empty()) {
            continue;
        }
        w.u32(id);
        w.u64(inbox.size());
        for (auto const& m : inbox) {
            w.u32(m.sender);
            w.u64(m.tweet);
            w.u64(idx.at(m.content));
            w.f64(m.score);
            w.i64(m.step);
        }
    }

    w.u64(s.pending_broadcasts.size());
    for (auto const& b : s.pending_broadcasts) {
        w.str(b.text);
        w.f64(b.score);
    }

    auto& bytes = w.bytes();
    auto const sum = fnv1a64(bytes);
    w.u64(sum);
    return std::move(bytes);
}

Checkpoint decode_checkpoint(std::span<unsigned char const> bytes)
{
    if (bytes.size() < sizeof kMagic + 4 + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw CheckpointError("checkpoint: not a checkpoint file");
    }
    auto const body = bytes.first(bytes.size() - 8);
    ByteReader tail(bytes.last(8));
    if (fnv1a64(body) != tail.u64()) {
        throw CheckpointError("checkpoint: checksum error (file truncated or corrupt)");
    }

    ByteReader r(body);
    for (std::size_t i = 0; i < sizeof kMagic; ++i) {
        r.u8();
    }
    Checkpoint c;
    c.version = r.u32();
    if (c.version != kCheckpointVersion) {
        throw CheckpointError("checkpoint: unsupported version " + std::to_string(c.version));
    }
    c.config_hash = r.u64();
    c.config_json = r.str();

    auto& s = c.state;
    s.step = r.i64();
    s.master_seed = r.u64();
    s.next_tweet = r.u64();
    s.driver_calls = r.u64();

    auto const n = static_cast<std::size_t>(r.u64());
    auto const edge_count = r.count(8);
    std::vector<Edge> edges(edge_count);
    for (auto& e : edges) {
        e.first = r.u32();
        e.second = r.u32();
    }
    try {
        s.graph = Graph::from_edges(n, edges);
    } catch (std::exception const& e) {
        throw CheckpointError(std::string("checkpoint: bad graph: ") + e.what());
    }
    s.opinions.resize(r.count(8));
    for (auto& o : s.opinions) {
        o = r.f64();
    }
    s.params.resize(r.count(16));
    for (auto& p : s.params) {
        p.confidence_bound = r.f64();
        p.convergence_rate = r.f64();
    }
    s.last_core.resize(r.count(4));
    for (auto& id : s.last_core) {
        id = r.u32();
    }
    auto const personas = r.count(4);
    for (std::size_t i = 0; i < personas; ++i) {
        auto const id = r.u32();
        s.personas.emplace(id, read_persona(r));
    }

    std::vector<ContentPtr> contents(r.count(16));
    for (auto& content : contents) {
        auto m = std::make_shared<MemoryContent>();
        m->text = r.str();
        m->embedding.resize(r.count(4));
        for (auto& x : m->embedding) {
            x = r.f32();
        }
        content = std::move(m);
    }
    auto const content_at = [&](std::uint64_t i) {
        if (i >= contents.size()) {
            throw CheckpointError("checkpoint: bad content index");
        }
        return contents[i];
    };

    s.tweets.resize(r.count(36));
    for (auto& t : s.tweets) {
        t.id = r.u64();
        t.author = r.u32();
        t.content = content_at(r.u64());
        t.score = r.f64();
        t.step = r.i64();
    }

    auto const read_records = [&](std::vector<MemoryRecord>& out) {
        out.resize(r.count(41));
        for (auto& m : out) {
            m.content = content_at(r.u64());
            m.importance = r.f64();
            m.timestamp = r.i64();
            auto const kind = r.u8();
            if (kind > 1) {
                throw CheckpointError("checkpoint: bad memory kind");
            }
            m.kind = static_cast<MemoryKind>(kind);
            m.tweet = r.u64();
            m.sequence = r.u64();
        }
    };
    s.memories.resize(static_cast<std::size_t>(r.u64()));
    auto const stores = r.count(12);
    for (std::size_t i = 0; i < stores; ++i) {
        auto const id = r.u32();
        if (id >= s.memories.size()) {
            throw CheckpointError("checkpoint: bad memory owner");
        }
        auto const next = r.u64();
        std::vector<MemoryRecord> personal;
        std::vector<MemoryRecord> environmental;
        read_records(personal);
        read_records(environmental);
        s.memories[id] = MemoryStore::restore(std::move(personal), std::move(environmental), next);
    }

    s.pending_texts.resize(static_cast<std::size_t>(r.u64()));
    auto const inboxes = r.count(12);
    for (std::size_t i = 0; i < inboxes; ++i) {
        auto const id = r.u32();
        if (id >= s.pending_texts.size()) {
            throw CheckpointError("checkpoint: bad inbox owner");
        }
        auto& inbox = s.pending_texts[id];
        inbox.resize(r.count(36));
        for (auto& m : inbox) {
            m.sender = r.u32();
            m.tweet = r.u64();
            m.content = content_at(r.u64());
            m.score = r.f64();
            m.step = r.i64();
        }
    }

    s.pending_broadcasts.resize(r.count(16));
    for (auto& b : s.pending_broadcasts) {
        b.text = r.str();
        b.score = r.f64();
    }
    if (r.remaining() != 0) {
        throw CheckpointError("checkpoint: trailing bytes");
    }
    return c;
}

void save_checkpoint(Checkpoint const& checkpoint, std::filesystem::path const& path)
{
    auto const bytes = encode_checkpoint(checkpoint);
    auto const tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CheckpointError("checkpoint: cannot write " + path.string());
        }
        out.write(reinterpret_cast<char const*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw CheckpointError("checkpoint: write failed for " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("checkpoint: cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace rumorsim
