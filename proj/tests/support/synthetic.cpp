#include "synthetic.hpp"

#include <algorithm>
#include <random>

namespace sdprofile::testing {

using nlohmann::json;

const std::vector<std::string>& pole_vocabulary(Pole p) {
    static const std::array<std::vector<std::string>, 8> vocab{{
        {"lol", "omg", "homework"},                // teenager
        {"mortgage", "colleague", "pension"},      // adult
        {"consequently", "hypothesis", "moreover"},// educated
        {"dunno", "gonna", "wanna"},               // nonliterate
        {"wife", "shaving", "fishing"},            // man
        {"husband", "makeup", "manicure"},         // woman
        {"compiler", "voltage", "algorithm"},      // technical
        {"poetry", "philosophy", "theatre"},       // humanitarian
    }};
    return vocab[static_cast<std::size_t>(p)];
}

const std::vector<std::string>& filler_vocabulary() {
    static const std::vector<std::string> filler{"the", "forum", "city", "today", "weather", "thanks",
                                                 "question", "friends", "street", "and", "we", "visited"};
    return filler;
}

json planted_rules_json(double saturation_density) {
    json rules = json::array();
    for (int i = 0; i < 8; ++i) {
        const auto p = static_cast<Pole>(i);
        rules.push_back({{"id", std::string(to_string(p)) + "-lex"},
                         {"characteristic", to_string(characteristic_of(p))},
                         {"pole", to_string(p)},
                         {"kind", "lexicon"},
                         {"weight", 1.0},
                         {"terms", pole_vocabulary(p)}});
    }
    return {{"saturation_density", saturation_density}, {"rules", rules}};
}

std::vector<SyntheticMember> forum_members() {
    using P = Pole;
    const std::array<Pole, 4> tech_man{P::adult, P::educated, P::man, P::technical};
    const std::array<Pole, 4> hum_man{P::adult, P::educated, P::man, P::humanitarian};
    const std::array<Pole, 4> hum_woman{P::adult, P::educated, P::woman, P::humanitarian};
    const std::array<Pole, 4> teen_girl{P::teenager, P::nonliterate, P::woman, P::humanitarian};
    using PP = PostingPattern;
    return {
        {"andriy", Role::administrator, tech_man, "Lviv, Ukraine", "2002-06-19T00:00:00Z", {20, 0}, PP::high},
        {"yuriy", Role::administrator, tech_man, "Lviv, Ukraine", "2003-04-22T00:00:00Z", {20, 0}, PP::high},
        {"taras", Role::member, tech_man, "Lviv, Ukraine", "2002-12-20T00:00:00Z", {20, 0}, PP::high},
        {"ihor", Role::member, tech_man, "Lviv", "2003-02-19T00:00:00Z", {7, 1}, PP::high},
        {"oleh", Role::member, tech_man, "Lviv", "2003-04-25T00:00:00Z", {14, 1}, PP::medium},
        {"rost", Role::member, tech_man, "Canada", "2002-11-24T00:00:00Z", {4, 1}, PP::high},
        {"oles", Role::member, hum_man, "Baden-Wuerttemberg", "2003-09-15T00:00:00Z", {11, 1}, PP::medium},
        {"iryna", Role::banned, teen_girl, "Dobrotvir", "2007-11-13T00:00:00Z", {3, 197}, PP::low_recent},
        {"odarka", Role::member, hum_woman, "Lviv", "2005-05-31T00:00:00Z", {20, 0}, PP::medium},
        {"yarema", Role::member, hum_man, "Poland, Kyiv, Lviv", "2004-03-22T00:00:00Z", {1, 5}, PP::high},
        {"maksym", Role::moderator, hum_man, "Luhansk", "2005-11-22T00:00:00Z", {17, 1}, PP::medium},
        {"andreas", Role::member, tech_man, "Offenburg, Deutschland", "2003-11-29T00:00:00Z", {3, 10}, PP::medium},
        {"ruslan", Role::member, tech_man, "Ternopil", "2007-01-02T00:00:00Z", {13, 4}, PP::medium},
        {"deputan", Role::member, tech_man, "Ukraine", "2002-06-19T00:00:00Z", {13, 1}, PP::low_old},
    };
}

std::vector<std::string> member_words(const SyntheticMember& m) {
    std::vector<std::string> words;
    for (const auto pole : m.declared) {
        const auto& own = pole_vocabulary(pole);
        const auto& other = pole_vocabulary(opposite(pole));
        for (std::size_t i = 0; i < m.plan.declared_hits; ++i) words.push_back(own[i % own.size()]);
        for (std::size_t i = 0; i < m.plan.opposite_hits; ++i) words.push_back(other[i % other.size()]);
    }
    const auto& filler = filler_vocabulary();
    for (std::size_t i = 0; words.size() < m.min_words; ++i) words.push_back(filler[i % filler.size()]);
    std::mt19937 rng(static_cast<unsigned>(std::hash<std::string>{}(m.username) & 0xffffffffu));
    std::shuffle(words.begin(), words.end(), rng);
    return words;
}

json build_export(const std::vector<SyntheticMember>& members, const std::string& exported_at) {
    using namespace std::chrono;
    const Timestamp end = parse_rfc3339(exported_at);
    json jm = json::array();
    json jp = json::array();
    for (const auto& m : members) {
        json declared = json::object();
        for (const auto pole : m.declared) declared[std::string(to_string(characteristic_of(pole)))] = to_string(pole);
        jm.push_back({{"username", m.username},
                      {"role", to_string(m.role)},
                      {"declared", declared},
                      {"location", m.location},
                      {"registered", m.registered}});

        std::size_t posts = 0;
        Timestamp first{};
        hours step{0};
        switch (m.posting) {
            case PostingPattern::high: posts = 60; first = end - days{59}; step = hours{23}; break;
            case PostingPattern::medium: posts = 20; first = end - days{80}; step = hours{72}; break;
            case PostingPattern::low_recent: posts = 2; first = end - days{10}; step = hours{24}; break;
            case PostingPattern::low_old: posts = 40; first = end - days{400}; step = hours{48}; break;
        }
        const auto words = member_words(m);
        for (std::size_t i = 0; i < posts; ++i) {
            std::string body;
            for (std::size_t w = i; w < words.size(); w += posts) {
                if (!body.empty()) body += ' ';
                body += words[w];
            }
            body += '.';
            jp.push_back({{"id", m.username + "-" + std::to_string(i)},
                          {"author", m.username},
                          {"at", format_rfc3339(first + step * static_cast<int>(i))},
                          {"body", body}});
        }
    }
    return {{"export", {{"source", "synthetic forum"}, {"exported_at", exported_at}}},
            {"members", jm},
            {"posts", jp}};
}

DeclaredProfile profile(const std::string& username, std::array<std::optional<Pole>, 4> declared,
                        const std::string& registered) {
    DeclaredProfile p;
    p.username = username;
    for (const auto c : kCharacteristics) p.set_declared(c, declared[index_of(c)]);
    p.registered = parse_rfc3339(registered);
    return p;
}

InformationTrack track_of(const DeclaredProfile& p, const std::vector<std::string>& bodies,
                          const std::string& first_post_at) {
    std::vector<Post> posts;
    const Timestamp t0 = parse_rfc3339(first_post_at);
    for (std::size_t i = 0; i < bodies.size(); ++i)
        posts.push_back({p.username + "#" + std::to_string(i), p.username, t0 + std::chrono::hours{static_cast<int>(i)},
                         bodies[i]});
    return InformationTrack(p, std::move(posts));
}

}  // namespace sdprofile::testing
