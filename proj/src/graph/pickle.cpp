#include "hagat/graph/pickle.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "hagat/errors.hpp"

namespace hagat::graph::pickle {
namespace {

using Kind = Object::Kind;

Ref make(Kind k) {
    auto o = std::make_shared<Object>();
    o->kind = k;
    return o;
}

Ref make_int(std::int64_t v) {
    auto o = make(Kind::integer);
    o->integer = v;
    return o;
}

Ref make_text(Kind k, std::string s) {
    auto o = make(k);
    o->text = std::move(s);
    return o;
}

[[noreturn]] void fail(const std::string& msg) { throw IngestionError("pickle: " + msg); }

// Converts UTF-8 to Latin-1 bytes; _codecs.encode(s, 'latin1') round trips bytes this way.
std::string utf8_to_latin1(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if ((c & 0xE0) == 0xC0 && i + 1 < s.size()) {
            const unsigned cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
            if (cp > 0xFF) fail("code point out of latin-1 range");
            out.push_back(static_cast<char>(cp));
            ++i;
        } else {
            fail("code point out of latin-1 range");
        }
    }
    return out;
}

void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the body of a Python 2 repr string literal (protocol 0 STRING).
std::string unrepr(std::string s) {
    if (s.size() < 2 || (s.front() != '\'' && s.front() != '"') || s.back() != s.front()) fail("bad STRING literal");
    s = s.substr(1, s.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out.push_back(s[i]);
            continue;
        }
        const char e = s[++i];
        switch (e) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            case '0': out.push_back('\0'); break;
            case '\\': out.push_back('\\'); break;
            case '\'': out.push_back('\''); break;
            case '"': out.push_back('"'); break;
            case 'x': {
                if (i + 2 >= s.size()) fail("bad \\x escape");
                out.push_back(static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16)));
                i += 2;
                break;
            }
            default: out.push_back('\\'); out.push_back(e);
        }
    }
    return out;
}

// Decodes raw-unicode-escape (protocol 0 UNICODE) into UTF-8.
std::string raw_unicode(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && (s[i + 1] == 'u' || s[i + 1] == 'U')) {
            const std::size_t len = s[i + 1] == 'u' ? 4 : 8;
            if (i + 2 + len > s.size()) fail("bad unicode escape");
            append_utf8(out, static_cast<unsigned>(std::stoul(s.substr(i + 2, len), nullptr, 16)));
            i += 1 + len;
        } else {
            append_utf8(out, static_cast<unsigned char>(s[i]));
        }
    }
    return out;
}

class Machine {
public:
    explicit Machine(const std::string& data) : data_(data) {}

    Ref run() {
        for (;;) {
            const auto op = static_cast<unsigned char>(byte());
            switch (op) {
                case 0x80: byte(); break;        // PROTO
                case 0x95: take(8); break;       // FRAME
                case '.': return pop();          // STOP
                case '(': marks_.push_back(stack_.size()); break;
                case '0': pop(); break;
                case '1': pop_mark(); break;
                case '2': push(top()); break;
                case 'N': push(make(Kind::none)); break;
                case 0x88: push_bool(true); break;
                case 0x89: push_bool(false); break;
                case 'I': {
                    const std::string s = line();
                    if (s == "01" || s == "00") {
                        push_bool(s == "01");
                    } else {
                        push(make_int(std::stoll(s)));
                    }
                    break;
                }
                case 'J': push(make_int(static_cast<std::int32_t>(le<std::uint32_t>(4)))); break;
                case 'K': push(make_int(le<std::uint8_t>(1))); break;
                case 'M': push(make_int(le<std::uint16_t>(2))); break;
                case 'L': {
                    std::string s = line();
                    if (!s.empty() && s.back() == 'L') s.pop_back();
                    push(make_int(std::stoll(s)));
                    break;
                }
                case 0x8a: push(make_int(long_bytes(le<std::uint8_t>(1)))); break;
                case 0x8b: push(make_int(long_bytes(le<std::uint32_t>(4)))); break;
                case 'F': {
                    auto o = make(Kind::real);
                    o->real = std::stod(line());
                    push(o);
                    break;
                }
                case 'G': {
                    std::uint64_t bits = 0;
                    for (int k = 0; k < 8; ++k) bits = (bits << 8) | static_cast<unsigned char>(byte());
                    auto o = make(Kind::real);
                    o->real = std::bit_cast<double>(bits);
                    push(o);
                    break;
                }
                case 'S': push(make_text(Kind::bytes, unrepr(line()))); break;
                case 'T': push(make_text(Kind::bytes, take(le<std::uint32_t>(4)))); break;
                case 'U': push(make_text(Kind::bytes, take(le<std::uint8_t>(1)))); break;
                case 'B': push(make_text(Kind::bytes, take(le<std::uint32_t>(4)))); break;
                case 'C': push(make_text(Kind::bytes, take(le<std::uint8_t>(1)))); break;
                case 0x8e: push(make_text(Kind::bytes, take(le<std::uint64_t>(8)))); break;
                case 0x96: push(make_text(Kind::bytes, take(le<std::uint64_t>(8)))); break;
                case 'V': push(make_text(Kind::text, raw_unicode(line()))); break;
                case 'X': push(make_text(Kind::text, take(le<std::uint32_t>(4)))); break;
                case 0x8c: push(make_text(Kind::text, take(le<std::uint8_t>(1)))); break;
                case 0x8d: push(make_text(Kind::text, take(le<std::uint64_t>(8)))); break;
                case ')': push(make(Kind::tuple)); break;
                case 't': {
                    auto o = make(Kind::tuple);
                    o->items = pop_mark();
                    push(o);
                    break;
                }
                case 0x85: case 0x86: case 0x87: {
                    const std::size_t n = op - 0x84;
                    if (stack_.size() < n) fail("stack underflow");
                    auto o = make(Kind::tuple);
                    o->items.assign(stack_.end() - static_cast<std::ptrdiff_t>(n), stack_.end());
                    stack_.resize(stack_.size() - n);
                    push(o);
                    break;
                }
                case ']': push(make(Kind::list)); break;
                case 'l': {
                    auto o = make(Kind::list);
                    o->items = pop_mark();
                    push(o);
                    break;
                }
                case 'a': {
                    Ref v = pop();
                    top()->items.push_back(v);
                    break;
                }
                case 'e': {
                    auto vs = pop_mark();
                    auto& dst = top()->items;
                    dst.insert(dst.end(), vs.begin(), vs.end());
                    break;
                }
                case '}': push(make(Kind::dict)); break;
                case 'd': {
                    auto o = make(Kind::dict);
                    auto vs = pop_mark();
                    if (vs.size() % 2) fail("odd DICT item count");
                    for (std::size_t k = 0; k < vs.size(); k += 2) o->entries.emplace_back(vs[k], vs[k + 1]);
                    push(o);
                    break;
                }
                case 's': {
                    Ref v = pop();
                    Ref k = pop();
                    top()->entries.emplace_back(k, v);
                    break;
                }
                case 'u': {
                    auto vs = pop_mark();
                    if (vs.size() % 2) fail("odd SETITEMS count");
                    for (std::size_t k = 0; k < vs.size(); k += 2) top()->entries.emplace_back(vs[k], vs[k + 1]);
                    break;
                }
                case 0x8f: push(make(Kind::set)); break;
                case 0x90: {
                    auto vs = pop_mark();
                    auto& dst = top()->items;
                    dst.insert(dst.end(), vs.begin(), vs.end());
                    break;
                }
                case 0x91: {
                    auto o = make(Kind::set);
                    o->items = pop_mark();
                    push(o);
                    break;
                }
                case 'c': {
                    std::string mod = line();
                    std::string name = line();
                    push(make_text(Kind::global, mod + "." + name));
                    break;
                }
                case 0x93: {
                    Ref name = pop();
                    Ref mod = pop();
                    push(make_text(Kind::global, mod->text + "." + name->text));
                    break;
                }
                case 'R': {
                    Ref args = pop();
                    Ref fn = pop();
                    push(reduce(fn, args));
                    break;
                }
                case 0x81: {
                    Ref args = pop();
                    Ref cls = pop();
                    push(instance(cls, args));
                    break;
                }
                case 0x92: {
                    pop();  // kwargs
                    Ref args = pop();
                    Ref cls = pop();
                    push(instance(cls, args));
                    break;
                }
                case 'i': {
                    std::string mod = line();
                    std::string name = line();
                    auto args = make(Kind::tuple);
                    args->items = pop_mark();
                    push(instance(make_text(Kind::global, mod + "." + name), args));
                    break;
                }
                case 'o': {
                    auto vs = pop_mark();
                    if (vs.empty()) fail("OBJ without class");
                    auto args = make(Kind::tuple);
                    args->items.assign(vs.begin() + 1, vs.end());
                    push(instance(vs.front(), args));
                    break;
                }
                case 'b': {
                    Ref st = pop();
                    Ref obj = top();
                    if (obj->is(Kind::instance)) {
                        obj->state = st;
                    } else if (obj->is(Kind::dict) && st->is(Kind::dict)) {
                        obj->entries.insert(obj->entries.end(), st->entries.begin(), st->entries.end());
                    } else {
                        obj->state = st;
                    }
                    break;
                }
                case 'p': memo_[std::stoll(line())] = top(); break;
                case 'q': memo_[le<std::uint8_t>(1)] = top(); break;
                case 'r': memo_[le<std::uint32_t>(4)] = top(); break;
                case 0x94: memo_[static_cast<std::int64_t>(memo_.size())] = top(); break;
                case 'g': push(memo(std::stoll(line()))); break;
                case 'h': push(memo(le<std::uint8_t>(1))); break;
                case 'j': push(memo(le<std::uint32_t>(4))); break;
                default: {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "0x%02x", op);
                    fail(std::string("unsupported opcode ") + buf + " at offset " + std::to_string(pos_ - 1));
                }
            }
        }
    }

private:
    char byte() {
        if (pos_ >= data_.size()) fail("truncated input");
        return data_[pos_++];
    }

    std::string take(std::uint64_t n) {
        if (n > data_.size() - pos_) fail("truncated input");
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    template <typename T>
    T le(int n) {
        T v = 0;
        for (int k = 0; k < n; ++k) v |= static_cast<T>(static_cast<unsigned char>(byte())) << (8 * k);
        return v;
    }

    std::int64_t long_bytes(std::uint64_t n) {
        if (n == 0) return 0;
        if (n > 8) fail("integer wider than 64 bits");
        const std::string s = take(n);
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[k])) << (8 * k);
        if (n < 8 && (static_cast<unsigned char>(s[n - 1]) & 0x80)) v |= ~std::uint64_t{0} << (8 * n);
        return static_cast<std::int64_t>(v);
    }

    std::string line() {
        const auto end = data_.find('\n', pos_);
        if (end == std::string::npos) fail("unterminated text field");
        std::string s = data_.substr(pos_, end - pos_);
        pos_ = end + 1;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        return s;
    }

    void push(Ref r) { stack_.push_back(std::move(r)); }
    void push_bool(bool b) {
        auto o = make(Kind::boolean);
        o->integer = b ? 1 : 0;
        push(o);
    }

    Ref pop() {
        if (stack_.empty() || (!marks_.empty() && stack_.size() <= marks_.back())) fail("stack underflow");
        Ref r = stack_.back();
        stack_.pop_back();
        return r;
    }

    Ref top() {
        if (stack_.empty()) fail("stack underflow");
        return stack_.back();
    }

    std::vector<Ref> pop_mark() {
        if (marks_.empty()) fail("missing MARK");
        const std::size_t m = marks_.back();
        marks_.pop_back();
        std::vector<Ref> out(stack_.begin() + static_cast<std::ptrdiff_t>(m), stack_.end());
        stack_.resize(m);
        return out;
    }

    Ref memo(std::int64_t k) {
        auto it = memo_.find(k);
        if (it == memo_.end()) fail("memo key " + std::to_string(k) + " missing");
        return it->second;
    }

    static Ref instance(Ref cls, Ref args) {
        auto o = make(Kind::instance);
        o->callable = std::move(cls);
        o->args = std::move(args);
        return o;
    }

    static bool ends_with(const std::string& s, const std::string& suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    }

    static Ref reduce(const Ref& fn, const Ref& args) {
        const std::string name = fn->is(Kind::global) ? fn->text : std::string();
        if (name == "_codecs.encode") {
            if (args->items.empty()) fail("_codecs.encode without arguments");
            const Ref& s = args->items[0];
            return make_text(Kind::bytes, s->is(Kind::text) ? utf8_to_latin1(s->text) : s->text);
        }
        if (name == "builtins.bytes" || name == "__builtin__.bytes" || name == "builtins.bytearray" ||
            name == "__builtin__.bytearray") {
            if (args->items.empty()) return make(Kind::bytes);
            const Ref& s = args->items[0];
            return make_text(Kind::bytes, s->is(Kind::text) ? utf8_to_latin1(s->text) : s->text);
        }
        if (name == "builtins.set" || name == "__builtin__.set" || name == "builtins.frozenset" ||
            name == "__builtin__.frozenset") {
            auto o = make(Kind::set);
            if (!args->items.empty()) o->items = args->items[0]->items;
            return o;
        }
        if (ends_with(name, "._reconstructor") && !args->items.empty()) return instance(args->items[0], args);
        return instance(fn, args);
    }

    const std::string& data_;
    std::size_t pos_ = 0;
    std::vector<Ref> stack_;
    std::vector<std::size_t> marks_;
    std::map<std::int64_t, Ref> memo_;
};

std::string global_name(const Ref& r) {
    return r && r->is(Kind::global) ? r->text : std::string();
}

bool contains(const std::string& s, const char* needle) { return s.find(needle) != std::string::npos; }

std::int64_t as_int(const Ref& r) {
    if (!r || !(r->is(Kind::integer) || r->is(Kind::boolean))) fail("expected an integer");
    return r->integer;
}

const std::vector<Ref>& tuple_items(const Ref& r) {
    if (!r || !(r->is(Kind::tuple) || r->is(Kind::list))) fail("expected a tuple");
    return r->items;
}

struct DType {
    char kind = 'f';   // f, i, u, b
    int size = 8;
    bool big_endian = false;
};

DType parse_dtype(const Ref& d) {
    if (!d || !d->is(Kind::instance) || !contains(global_name(d->callable), "dtype")) {
        fail("array without a numpy dtype");
    }
    const auto& a = tuple_items(d->args);
    if (a.empty() || !(a[0]->is(Kind::text) || a[0]->is(Kind::bytes))) fail("dtype without a type string");
    const std::string t = a[0]->text;
    DType out;
    if (t == "?" || t == "b1") {
        out.kind = 'b';
        out.size = 1;
    } else if (t.size() >= 2 && (t[0] == 'f' || t[0] == 'i' || t[0] == 'u')) {
        out.kind = t[0];
        out.size = std::stoi(t.substr(1));
    } else {
        fail("unsupported dtype '" + t + "'");
    }
    if (d->state && d->state->is(Kind::tuple) && d->state->items.size() > 1) {
        const Ref& bo = d->state->items[1];
        if (bo->is(Kind::text) || bo->is(Kind::bytes)) out.big_endian = bo->text == ">";
    }
    return out;
}

double read_scalar(const char* p, const DType& t) {
    unsigned char buf[8];
    std::memcpy(buf, p, t.size);
    if (t.big_endian) std::reverse(buf, buf + t.size);
    switch (t.kind) {
        case 'b': return buf[0] ? 1.0 : 0.0;
        case 'f':
            if (t.size == 8) {
                double v;
                std::memcpy(&v, buf, 8);
                return v;
            }
            if (t.size == 4) {
                float v;
                std::memcpy(&v, buf, 4);
                return v;
            }
            break;
        case 'i':
            switch (t.size) {
                case 1: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
                case 2: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
                case 4: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
                case 8: { std::int64_t v; std::memcpy(&v, buf, 8); return static_cast<double>(v); }
            }
            break;
        case 'u':
            switch (t.size) {
                case 1: return buf[0];
                case 2: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
                case 4: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
                case 8: { std::uint64_t v; std::memcpy(&v, buf, 8); return static_cast<double>(v); }
            }
            break;
    }
    fail("unsupported dtype width " + std::to_string(t.size));
}

ad::Matrix from_raw(const std::string& raw, const DType& t, std::vector<std::int64_t> shape, bool fortran) {
    if (shape.size() > 2) fail("arrays above two dimensions are not supported");
    const std::int64_t rows = shape.empty() ? 1 : shape[0];
    const std::int64_t cols = shape.size() < 2 ? 1 : shape[1];
    if (static_cast<std::int64_t>(raw.size()) != rows * cols * t.size) fail("array byte count does not match shape");
    ad::Matrix m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < cols; ++c) {
            const std::int64_t k = fortran ? c * rows + r : r * cols + c;
            m(r, c) = read_scalar(raw.data() + k * t.size, t);
        }
    }
    return m;
}

}  // namespace

Ref Object::get(const std::string& key) const {
    const std::vector<std::pair<Ref, Ref>>* src = &entries;
    if (kind == Kind::instance && state && state->is(Kind::dict)) src = &state->entries;
    if (kind == Kind::instance && state && state->is(Kind::tuple) && state->items.size() == 2 &&
        state->items[1]->is(Kind::dict)) {
        src = &state->items[1]->entries;  // (dict_state, slot_state)
        if (state->items[0]->is(Kind::dict)) src = &state->items[0]->entries;
    }
    for (const auto& [k, v] : *src) {
        if ((k->is(Kind::text) || k->is(Kind::bytes)) && k->text == key) return v;
    }
    return nullptr;
}

Ref load(const std::string& bytes) {
    Machine m(bytes);
    return m.run();
}

Ref load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return load(bytes);
    } catch (const IngestionError& e) {
        throw IngestionError(path.string() + ": " + e.what());
    }
}

ad::Matrix to_dense(const Ref& obj) {
    if (!obj || !obj->is(Kind::instance)) fail("expected a numpy array");
    const std::string fn = global_name(obj->callable);
    if (contains(fn, "_frombuffer")) {
        const auto& a = tuple_items(obj->args);
        if (a.size() < 3) fail("_frombuffer with too few arguments");
        std::vector<std::int64_t> shape;
        for (const Ref& s : tuple_items(a[2])) shape.push_back(as_int(s));
        const bool fortran = a.size() > 3 && a[3]->text == "F";
        return from_raw(a[0]->text, parse_dtype(a[1]), shape, fortran);
    }
    if (!contains(fn, "_reconstruct")) fail("object '" + fn + "' is not a numpy array");
    const auto& st = tuple_items(obj->state);
    if (st.size() < 5) fail("numpy array state too short");
    std::vector<std::int64_t> shape;
    for (const Ref& s : tuple_items(st[1])) shape.push_back(as_int(s));
    const bool fortran = as_int(st[3]) != 0;
    if (!st[4]->is(Kind::bytes) && !st[4]->is(Kind::text)) fail("object arrays are not supported");
    const std::string raw = st[4]->is(Kind::text) ? utf8_to_latin1(st[4]->text) : st[4]->text;
    return from_raw(raw, parse_dtype(st[2]), shape, fortran);
}

ad::Matrix array_or_sparse_to_dense(const Ref& obj) {
    if (!obj || !obj->is(Kind::instance)) fail("expected an array or sparse matrix");
    const std::string cls = global_name(obj->callable);
    if (contains(cls, "_reconstruct") || contains(cls, "_frombuffer")) return to_dense(obj);

    Ref shape_ref = obj->get("_shape");
    if (!shape_ref) shape_ref = obj->get("shape");
    if (!shape_ref) fail("sparse matrix without a shape");
    const auto& sh = tuple_items(shape_ref);
    if (sh.size() != 2) fail("sparse matrix shape must be 2-D");
    const std::int64_t rows = as_int(sh[0]), cols = as_int(sh[1]);

    ad::Matrix out = ad::Matrix::Zero(rows, cols);
    Ref data = obj->get("data");
    if (!data) fail("sparse matrix without data");
    const ad::Matrix vals = to_dense(data);
    if (obj->get("indptr")) {
        const ad::Matrix ptr = to_dense(obj->get("indptr"));
        const ad::Matrix idx = to_dense(obj->get("indices"));
        const bool csc = contains(cls, "csc");
        const std::int64_t major = csc ? cols : rows;
        if (ptr.size() != major + 1) fail("indptr length does not match shape");
        for (std::int64_t a = 0; a < major; ++a) {
            for (auto k = static_cast<std::int64_t>(ptr(a, 0)); k < static_cast<std::int64_t>(ptr(a + 1, 0)); ++k) {
                const auto b = static_cast<std::int64_t>(idx(k, 0));
                if (b < 0 || b >= (csc ? rows : cols) || k >= vals.rows()) fail("sparse index out of range");
                if (csc) {
                    out(b, a) += vals(k, 0);
                } else {
                    out(a, b) += vals(k, 0);
                }
            }
        }
        return out;
    }
    Ref row = obj->get("row"), col = obj->get("col");
    if (Ref coords = obj->get("coords"); coords && coords->items.size() == 2) {
        row = coords->items[0];
        col = coords->items[1];
    }
    if (row && col) {
        const ad::Matrix r = to_dense(row);
        const ad::Matrix c = to_dense(col);
        if (r.rows() != vals.rows() || c.rows() != vals.rows()) fail("coordinate arrays do not match data");
        for (Eigen::Index k = 0; k < vals.rows(); ++k) {
            out(static_cast<Eigen::Index>(r(k, 0)), static_cast<Eigen::Index>(c(k, 0))) += vals(k, 0);
        }
        return out;
    }
    fail("unsupported sparse format '" + cls + "'");
}

std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> to_adjacency(const Ref& obj) {
    if (!obj || !(obj->is(Kind::dict) || obj->is(Kind::instance))) fail("expected a dict adjacency list");
    std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> out;
    for (const auto& [k, v] : obj->entries) {
        std::vector<std::int64_t> nbrs;
        for (const Ref& x : tuple_items(v)) nbrs.push_back(as_int(x));
        out.emplace_back(as_int(k), std::move(nbrs));
    }
    return out;
}

}  // namespace hagat::graph::pickle
