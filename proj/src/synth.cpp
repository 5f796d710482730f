#include "moverec/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <sstream>

#include "moverec/frontend.hpp"

namespace moverec {

namespace {

constexpr std::array kDataNouns = {"Account", "Parcel",  "Sensor", "Vehicle", "Ticket",  "Invoice",
                                   "Patient", "Battery", "Course", "Shelf",   "Engine",  "Wallet",
                                   "Crate",   "Meter",   "Route",  "Tariff",  "Voucher", "Pallet"};
constexpr std::array kFields = {"amount", "price", "weight", "quantity", "level",    "rate",
                                "size",   "speed", "score",  "quota",    "balance",  "capacity"};
constexpr std::array kServiceNouns = {"Billing", "Shipping",  "Inventory", "Audit",
                                      "Pricing", "Dispatch", "Planning",  "Reporting"};
constexpr std::array kServiceSuffixes = {"Service", "Manager", "Processor"};

enum class Verb { Total, Check, Adjust, Merge, Scale, Describe };
constexpr std::array kVerbs = {Verb::Total, Verb::Check, Verb::Adjust, Verb::Merge, Verb::Scale, Verb::Describe};

std::string verb_word(Verb v) {
    switch (v) {
        case Verb::Total: return "total";
        case Verb::Check: return "check";
        case Verb::Adjust: return "adjust";
        case Verb::Merge: return "merge";
        case Verb::Scale: return "scale";
        case Verb::Describe: return "describe";
    }
    return "run";
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string lower_first(std::string s) {
    if (!s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
    return s;
}

template <typename T>
std::size_t pick(std::mt19937_64& rng, const T& pool) {
    return std::uniform_int_distribution<std::size_t>(0, std::size(pool) - 1)(rng);
}

bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct DataClass {
    std::string name;
    std::vector<std::string> fields;
};

// Indented line writer.
class Src {
public:
    Src& line(const std::string& text = {}) {
        if (!text.empty()) out_ << std::string(indent_ * 4, ' ') << text;
        out_ << '\n';
        return *this;
    }
    Src& open(const std::string& text) {
        line(text + " {");
        ++indent_;
        return *this;
    }
    // "} else {" between two blocks
    Src& reopen(const std::string& text) {
        --indent_;
        line("} " + text + " {");
        ++indent_;
        return *this;
    }
    Src& close(const std::string& suffix = {}) {
        --indent_;
        line("}" + suffix);
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    std::size_t indent_ = 0;
};

std::string data_class_source(const DataClass& dc, std::mt19937_64& rng) {
    Src s;
    s.open("class " + dc.name);
    for (const auto& f : dc.fields) s.line("int " + f + ";");
    s.line();
    s.open(dc.name + "(int initial)").line(dc.fields[0] + " = initial;").close();
    for (const auto& f : dc.fields) {
        s.line();
        s.open("int get" + capitalize(f) + "()").line("return " + f + ";").close();
        s.line();
        s.open("void set" + capitalize(f) + "(int value)").line(f + " = value;").close();
    }
    const std::string& a = dc.fields[0];
    const std::string& b = dc.fields[1];
    const std::string& c = dc.fields.back();
    s.line();
    s.open("boolean isEmpty()").line("return " + a + " == 0;").close();
    s.line();
    s.open("int combined()").line("return " + a + " + " + b + " * " + c + ";").close();
    if (coin(rng)) {
        s.line();
        s.open("boolean exceeds(int bound)").line("return " + b + " > bound;").close();
    }
    if (coin(rng)) {
        s.line();
        s.open("boolean same" + capitalize(a) + "(" + dc.name + " other)")
            .line("return " + a + " == other.get" + capitalize(a) + "();")
            .close();
    }
    s.close();
    return s.str();
}

// A method that works only through its parameters.
void movable_method(Src& s, Verb verb, const DataClass& t, const std::string& field, const DataClass& other,
                    const std::string& other_field, std::mt19937_64& rng) {
    const std::string p = lower_first(t.name);
    const std::string get = p + ".get" + capitalize(field) + "()";
    const std::string name = verb_word(verb) + capitalize(field);
    const std::string second = t.fields[(std::find(t.fields.begin(), t.fields.end(), field) - t.fields.begin() + 1) %
                                        t.fields.size()];
    switch (verb) {
        case Verb::Total:
            s.open("int " + name + "(" + t.name + " " + p + ", int times)");
            s.line("int result = 0;").line("int i = 0;");
            s.open("while (i < times)").line("result = result + " + get + ";").line("i = i + 1;").close();
            s.line("return result;");
            break;
        case Verb::Check:
            s.open("boolean " + name + "(" + t.name + " " + p + ", int bound)");
            s.line("int value = " + get + " * " + std::to_string(2 + pick(rng, kFields) % 3) + ";");
            s.open("if (value > bound)").line("return true;").close();
            s.line("return " + p + ".get" + capitalize(second) + "() < bound;");
            break;
        case Verb::Adjust:
            s.open("void " + name + "(" + t.name + " " + p + ", int delta)");
            s.line("int next = " + get + " + delta;");
            s.open("if (next < 0)").line("next = 0;").close();
            s.line(p + ".set" + capitalize(field) + "(next);");
            break;
        case Verb::Merge: {
            const std::string q = lower_first(other.name) == p ? "peer" : lower_first(other.name);
            s.open("int " + name + "(" + t.name + " " + p + ", " + other.name + " " + q + ")");
            s.line("int left = " + get + ";");
            s.line("int right = " + q + ".get" + capitalize(other_field) + "();");
            s.line("return left > right ? left - right : right - left;");
            break;
        }
        case Verb::Scale:
            s.open("int " + name + "(" + t.name + " " + p + ", int factor)");
            s.line("int scaled = " + get + " * factor;");
            s.open("while (scaled > 1000)").line("scaled = scaled / 2;").close();
            s.line("return scaled;");
            break;
        case Verb::Describe:
            s.open("String " + name + "(" + t.name + " " + p + ")");
            s.line("String label = \"" + field + "\";");
            s.open("if (" + p + ".isEmpty())").line("label = \"none\";").close();
            s.line("return label + " + get + ";");
            break;
    }
    s.close();
}

std::string service_class_source(const std::string& name, const std::vector<DataClass>& data,
                                 const SynthOptions& options, std::mt19937_64& rng) {
    Src s;
    s.open("class " + name);
    s.line("int processed;").line("int ceiling;");

    std::set<std::string> used;
    std::size_t emitted = 0;
    for (std::size_t attempt = 0; emitted < options.movable_per_service && attempt < 50; ++attempt) {
        const Verb verb = kVerbs[pick(rng, kVerbs)];
        const DataClass& t = data[pick(rng, data)];
        const std::string& field = t.fields[pick(rng, t.fields)];
        const DataClass& other = data[pick(rng, data)];
        const std::string& other_field = other.fields[pick(rng, other.fields)];
        const std::string key = verb_word(verb) + capitalize(field);
        if (!used.insert(key).second) continue;
        s.line();
        movable_method(s, verb, t, field, other, other_field, rng);
        ++emitted;
    }
    for (std::size_t i = 0; i < options.stateful_per_service; ++i) {
        const DataClass& t = data[pick(rng, data)];
        const std::string& field = t.fields[pick(rng, t.fields)];
        const std::string p = lower_first(t.name);
        s.line();
        if (i % 2 == 0) {
            s.open("int record" + capitalize(field) + std::to_string(i) + "(" + t.name + " " + p + ")");
            s.line("processed = processed + " + p + ".get" + capitalize(field) + "();");
            s.open("if (processed > ceiling)").line("processed = ceiling;").close();
            s.line("return processed;");
        } else {
            s.open("boolean allow" + capitalize(field) + std::to_string(i) + "(" + t.name + " " + p + ")");
            s.line("int room = ceiling - processed;");
            s.line("return " + p + ".get" + capitalize(field) + "() <= room;");
        }
        s.close();
    }
    s.line();
    s.open("void reset()").line("processed = 0;").close();
    s.close();
    return s.str();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> generate_project_sources(const std::string& project,
                                                                          const SynthOptions& options,
                                                                          std::uint64_t project_seed) {
    if (options.data_classes == 0 || options.data_classes > kDataNouns.size()) {
        throw ConfigError("data_classes must be in [1, " + std::to_string(kDataNouns.size()) + "]");
    }
    if (options.service_classes > kServiceNouns.size() * kServiceSuffixes.size()) {
        throw ConfigError("too many service classes");
    }
    std::mt19937_64 rng(project_seed);

    std::vector<std::string> nouns(kDataNouns.begin(), kDataNouns.end());
    std::shuffle(nouns.begin(), nouns.end(), rng);
    std::vector<DataClass> data;
    for (std::size_t i = 0; i < options.data_classes; ++i) {
        std::vector<std::string> fields(kFields.begin(), kFields.end());
        std::shuffle(fields.begin(), fields.end(), rng);
        fields.resize(3);
        data.push_back({nouns[i], fields});
    }

    std::vector<std::string> services;
    for (const char* n : kServiceNouns) {
        for (const char* suffix : kServiceSuffixes) services.push_back(std::string(n) + suffix);
    }
    std::shuffle(services.begin(), services.end(), rng);
    services.resize(options.service_classes);

    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& dc : data) files.emplace_back(project + "/" + dc.name + ".java", data_class_source(dc, rng));
    for (const auto& name : services) {
        files.emplace_back(project + "/" + name + ".java", service_class_source(name, data, options, rng));
    }
    std::sort(files.begin(), files.end());
    return files;
}

Corpus generate_corpus(const SynthOptions& options) {
    Corpus corpus;
    std::mt19937_64 seeder(options.seed);
    for (std::size_t p = 0; p < options.projects; ++p) {
        char name[16];
        std::snprintf(name, sizeof name, "proj%02zu", p);
        for (auto& [path, text] : generate_project_sources(name, options, seeder())) {
            corpus.units.push_back(parse_unit(text, path));
        }
    }
    return corpus;
}

namespace {

class RandomCode {
public:
    RandomCode(std::mt19937_64& rng, const RandomCodeOptions& options) : rng_(rng), options_(options) {}

    std::string expr(std::size_t depth) {
        const std::size_t choice = depth >= options_.max_depth ? uniform(3) : uniform(9);
        switch (choice) {
            case 0: return std::to_string(uniform(100));
            case 1: return name();
            case 2: return coin(rng_) ? "\"s" + std::to_string(uniform(5)) + "\"" : (coin(rng_) ? "true" : "this");
            case 3: return name() + "." + member();
            case 4: return call(depth);
            case 5:
            case 6: {
                static constexpr std::array ops = {"+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "&&", "||"};
                return expr(depth + 1) + " " + ops[pick(rng_, ops)] + " " + expr(depth + 1);
            }
            case 7: return expr(depth + 1) + " ? " + expr(depth + 1) + " : " + expr(depth + 1);
            default: return "(" + expr(depth + 1) + ")";
        }
    }

    void block(Src& s, std::size_t depth, bool allow_return) {
        const std::size_t n = 1 + uniform(options_.max_statements);
        for (std::size_t i = 0; i < n; ++i) statement(s, depth, allow_return && i + 1 == n);
    }

    void statement(Src& s, std::size_t depth, bool allow_return) {
        const std::size_t choice = depth >= options_.max_depth ? uniform(3) : uniform(6);
        switch (choice) {
            case 0: s.line("int v" + std::to_string(locals_++) + " = " + expr(depth + 1) + ";"); break;
            case 1: s.line(target() + " = " + expr(depth + 1) + ";"); break;
            case 2: s.line(call(depth + 1) + ";"); break;
            case 3:
                s.open("if (" + expr(depth + 1) + ")");
                block(s, depth + 1, false);
                if (coin(rng_)) {
                    s.reopen("else");
                    block(s, depth + 1, false);
                }
                s.close();
                break;
            case 4:
                s.open("while (" + expr(depth + 1) + ")");
                block(s, depth + 1, false);
                s.close();
                break;
            default: s.line("return " + expr(depth + 1) + ";"); break;
        }
        if (allow_return && coin(rng_, 0.3)) s.line("return " + expr(depth + 1) + ";");
    }

private:
    std::size_t uniform(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::string name() {
        static constexpr std::array names = {"a", "b", "c", "x", "y", "other", "count"};
        return names[pick(rng_, names)];
    }
    std::string member() {
        static constexpr std::array members = {"size", "next", "value", "owner"};
        return members[pick(rng_, members)];
    }
    std::string target() { return coin(rng_) ? name() : name() + "." + member(); }
    std::string call(std::size_t depth) {
        static constexpr std::array fns = {"run", "apply", "step", "emit"};
        std::string callee = coin(rng_) ? std::string(fns[pick(rng_, fns)]) : name() + "." + fns[pick(rng_, fns)];
        std::string args;
        const std::size_t n = uniform(3);
        for (std::size_t i = 0; i < n; ++i) args += (i ? ", " : "") + expr(depth + 1);
        return callee + "(" + args + ")";
    }

    std::mt19937_64& rng_;
    RandomCodeOptions options_;
    std::size_t locals_ = 0;
};

}  // namespace

std::string random_class_source(std::mt19937_64& rng, const RandomCodeOptions& options) {
    RandomCode gen(rng, options);
    Src s;
    s.open("class Sample");
    s.line("int count;");
    s.line();
    s.open("int work(int a, Node b, int c)");
    gen.block(s, 0, true);
    s.close();
    s.close();
    return s.str();
}

}  // namespace moverec
