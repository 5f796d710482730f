#include "moverec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "moverec/frontend.hpp"

namespace moverec {

namespace fs = std::filesystem;

std::string project_of(std::string_view id_or_path) {
    auto slash = id_or_path.find('/');
    if (slash == std::string_view::npos) return {};
    return std::string(id_or_path.substr(0, slash));
}

std::vector<std::string> Corpus::projects() const {
    std::set<std::string> names;
    for (const auto& u : units) names.insert(project_of(u.file_path));
    return {names.begin(), names.end()};
}

Corpus load_corpus(const fs::path& root) {
    if (!fs::is_directory(root)) throw MissingArtifact(root.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".java") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    Corpus corpus;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string rel = file.lexically_relative(root).generic_string();
        corpus.units.push_back(parse_unit(buf.str(), rel));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& root) {
    for (const auto& unit : corpus.units) {
        fs::path out = root / fs::path(unit.file_path);
        fs::create_directories(out.parent_path());
        std::ofstream os(out, std::ios::binary);
        os << print_unit(unit);
        if (!os) throw InternalError("failed to write " + out.string());
    }
}

MethodRef find_enclosing(const Corpus& corpus, std::string_view method_id) {
    for (const auto& unit : corpus.units) {
        for (const auto& cls : unit.classes) {
            for (const auto& m : cls.methods) {
                if (m.id == method_id) return {&unit, &cls, &m};
            }
        }
    }
    throw NotFound("method not found: " + std::string(method_id));
}

ClassRef find_class(const Corpus& corpus, std::string_view class_id) {
    for (const auto& unit : corpus.units) {
        for (const auto& cls : unit.classes) {
            if (cls.id == class_id) return {&unit, &cls};
        }
    }
    throw NotFound("class not found: " + std::string(class_id));
}

ClassIndex::ClassIndex(const Corpus& corpus) {
    std::set<std::pair<std::string, std::string>> ambiguous;
    for (const auto& unit : corpus.units) {
        std::string project = project_of(unit.file_path);
        for (const auto& cls : unit.classes) {
            by_id_.emplace(cls.id, &cls);
            auto key = std::make_pair(project, cls.name);
            if (!by_name_.emplace(key, &cls).second) ambiguous.insert(key);
        }
    }
    for (const auto& key : ambiguous) by_name_.erase(key);
}

const ClassDecl* ClassIndex::resolve(std::string_view project, std::string_view class_name) const {
    auto it = by_name_.find(std::make_pair(std::string(project), std::string(class_name)));
    return it == by_name_.end() ? nullptr : it->second;
}

const ClassDecl* ClassIndex::by_id(std::string_view class_id) const {
    auto it = by_id_.find(class_id);
    return it == by_id_.end() ? nullptr : it->second;
}

bool same_structure(const Corpus& a, const Corpus& b) {
    if (a.units.size() != b.units.size()) return false;
    for (std::size_t i = 0; i < a.units.size(); ++i) {
        if (a.units[i].file_path != b.units[i].file_path) return false;
        if (!same_structure(a.units[i], b.units[i])) return false;
    }
    return true;
}

}  // namespace moverec
