#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace riskdyn {

/// Flat sectioned `key = value` text shared by config files and report
/// documents. Blank lines and lines starting with '#' are ignored on read;
/// order of sections and keys is preserved.
class KeyValueDocument {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };

    static KeyValueDocument parse(std::istream& in);

    /// Writes `comment` lines (each prefixed with "# ") and then every section.
    void write(std::ostream& out, const std::vector<std::string>& comment = {}) const;

    const std::string* find(std::string_view section, std::string_view key) const;
    /// Throws ParseError naming the missing key.
    const Entry& require(std::string_view section, std::string_view key) const;
    void set(std::string_view section, std::string_view key, std::string value);

    const std::vector<Section>& sections() const noexcept { return sections_; }
    std::vector<Section>& sections() noexcept { return sections_; }

private:
    std::vector<Section> sections_;
};

/// Strict decimal parse of a whole string; rejects NaN and infinities.
bool parse_finite_double(std::string_view text, double& out);

/// %.17g formatting: lossless for binary64.
std::string format_g17(double value);

/// Shortest decimal string that parses back to `value`.
std::string format_shortest(double value);

}  // namespace riskdyn
