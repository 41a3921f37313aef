#include "elcmp/synthetic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace elcmp {

namespace {

// ------------------------------------------------------------------ pools

struct Category {
  const char* name;
  const char* verb;  // do-you verb ("do you <verb> <entity>")
  std::vector<const char*> common;
};

const std::vector<Category>& categories() {
  static const std::vector<Category> cats = {
      {"movie", "watch", {"titanic", "avatar", "inception", "jaws", "frozen", "coco", "up", "gladiator"}},
      {"book", "read", {"dune", "hamlet", "emma", "dracula", "frankenstein", "matilda", "beloved", "ulysses"}},
      {"game", "play", {"chess", "checkers", "monopoly", "tetris", "minecraft", "scrabble", "poker", "dominoes"}},
      {"sport", "play", {"soccer", "tennis", "baseball", "hockey", "golf", "basketball", "cricket", "rugby"}},
      {"animal", "like", {"dogs", "cats", "horses", "rabbits", "parrots", "turtles", "dolphins", "hamsters"}},
      {"food", "eat", {"pizza", "sushi", "pasta", "tacos", "curry", "pancakes", "salad", "ramen"}},
      {"color", "like", {"blue", "red", "green", "purple", "orange", "yellow", "pink", "teal"}},
  };
  return cats;
}

const std::vector<const char*>& topic_pool() {
  static const std::vector<const char*> topics = {
      "guitars", "politics", "music",   "movies",  "sports",
      "technology", "history",  "science", "space",   "cooking"};
  return topics;
}

const std::vector<const char*>& feeling_pool() {
  static const std::vector<const char*> v = {"sad",    "happy", "angry", "lonely",
                                             "scared", "fine",  "great"};
  return v;
}

const std::vector<const char*>& reaction_pool() {
  static const std::vector<const char*> v = {"great", "cool", "nice", "awesome",
                                             "wow",   "sad",  "happy"};
  return v;
}

const std::vector<std::vector<const char*>>& tmp_phrases() {
  static const std::vector<std::vector<const char*>> v = {
      {"every", "single", "day"}, {"once", "a", "week"},   {"all", "the", "time"},
      {"twice", "a", "month"},    {"every", "weekend"}};
  return v;
}

struct Activity {
  const char* verb;
  const char* object;
};
const std::vector<Activity>& activities() {
  static const std::vector<Activity> v = {{"watch", "movies"}, {"read", "books"},
                                          {"play", "games"},   {"play", "sports"},
                                          {"watch", "television"}};
  return v;
}

const std::vector<const char*>& sub_nouns() {
  static const std::vector<const char*> v = {"robots", "dragons", "pirates",
                                             "wizards", "aliens", "knights"};
  return v;
}
const std::vector<const char*>& sub_verbs() {
  static const std::vector<const char*> v = {"fight", "dance", "sing",
                                             "escape", "battle", "race"};
  return v;
}

const std::vector<const char*>& syllables() {
  static const std::vector<const char*> v = {
      "ba", "be", "bi", "bo", "da", "do", "ka", "ke", "ko", "la", "le", "li",
      "lo", "ma", "me", "mi", "mo", "na", "ne", "no", "ra", "re", "ri", "ro",
      "sa", "se", "si", "so", "ta", "te", "ti", "to", "va", "vi", "vo", "za"};
  return v;
}

// Name-like rare token; the pool is large enough that most draws are unique
// within a corpus, which is what exercises the copy path.
std::string rare_entity(Rng& rng) {
  const auto& syl = syllables();
  std::string s;
  std::size_t n = 2 + rng.next_below(2);
  for (std::size_t i = 0; i < n; ++i) s += syl[rng.next_below(syl.size())];
  static const char* finals[] = {"", "n", "r", "l", "s"};
  s += finals[rng.next_below(5)];
  return s;
}

constexpr double kCommonEntityProb = 0.3;

std::string draw_entity(Rng& rng, const Category& cat) {
  if (rng.next_double() < kCommonEntityProb)
    return cat.common[rng.next_below(cat.common.size())];
  return rare_entity(rng);
}

std::vector<std::string> tok(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::vector<std::string> tags_from_spans(
    std::size_t len,
    const std::vector<std::tuple<std::string, std::size_t, std::size_t>>& spans) {
  std::vector<std::string> tags(len, "O");
  for (const auto& [role, s, e] : spans) {
    tags[s] = "B-" + role;
    for (std::size_t i = s + 1; i <= e; ++i) tags[i] = "I-" + role;
  }
  return tags;
}

SrlAnnotation context_frame(
    std::size_t len,
    const std::vector<std::tuple<std::string, std::size_t, std::size_t>>& spans) {
  SrlAnnotation fr;
  fr.predicate_source = PredicateSource::in_context;
  fr.tags = tags_from_spans(len, spans);
  return fr;
}

SrlAnnotation utterance_frame(
    std::size_t len, std::pair<std::size_t, std::size_t> pred,
    const std::vector<std::tuple<std::string, std::size_t, std::size_t>>& spans) {
  SrlAnnotation fr;
  fr.predicate_source = PredicateSource::in_utterance;
  fr.predicate_span = pred;
  fr.tags = tags_from_spans(len, spans);
  return fr;
}

// ------------------------------------------------------------------ scenarios

struct Scenario {
  std::vector<std::string> system;
  std::vector<std::string> source;
  std::vector<std::string> reference;
  CompletionCase ccase = CompletionCase::had_ellipsis;
  std::vector<std::string> da;  // label names, annotated on the original
  std::vector<SrlAnnotation> frames_orig;
  std::vector<SrlAnnotation> frames_comp;
};

Scenario what_favorite(Rng& rng) {
  const auto& cat = categories()[rng.next_below(categories().size())];
  std::string ent = draw_entity(rng, cat);
  Scenario s;
  s.system = tok("what is your favorite " + std::string(cat.name));
  s.source = {ent};
  s.reference = tok("my favorite " + std::string(cat.name) + " is " + ent);
  s.da = {"statement"};
  s.frames_orig = {context_frame(1, {{"ARG2", 0, 0}})};
  s.frames_comp = {utterance_frame(5, {3, 3}, {{"ARG1", 0, 2}, {"ARG2", 4, 4}})};
  return s;
}

Scenario talk_about(Rng& rng) {
  std::string ent = topic_pool()[rng.next_below(topic_pool().size())];
  Scenario s;
  s.system = tok("what do you want to talk about");
  s.source = {ent};
  s.reference = tok("i want to talk about " + ent);
  s.da = {"statement"};
  s.frames_orig = {context_frame(1, {{"ARG1", 0, 0}})};
  s.frames_comp = {utterance_frame(6, {3, 4}, {{"ARG0", 0, 0}, {"ARG1", 5, 5}})};
  return s;
}

// do-you question forms shared by the yes/no/hold answers. The echo is the
// declarative restatement used to build the completion.
struct DoYouForm {
  std::vector<std::string> system;
  std::vector<std::string> echo;      // "i like dogs" / "i have read ..."
  std::vector<std::string> neg_echo;  // "i do not like dogs" / ...
  std::size_t pred_off;               // predicate index within echo
  std::size_t neg_pred_off;           // predicate index within neg_echo
  std::size_t arg1_begin, arg1_end;   // within echo
};

DoYouForm draw_do_you_form(Rng& rng, bool allow_entity) {
  std::size_t pick = rng.next_below(allow_entity ? 5 : 2);
  DoYouForm f;
  if (pick == 0) {
    f.system = tok("have you read any other books by the same author");
    f.echo = tok("i have read any other books by the same author");
    f.neg_echo = tok("i have not read any other books by the same author");
    f.pred_off = 2;  // read
    f.neg_pred_off = 3;
    f.arg1_begin = 3;
    f.arg1_end = 9;
  } else if (pick == 1) {
    f.system = tok("have you seen any other movies by that director");
    f.echo = tok("i have seen any other movies by that director");
    f.neg_echo = tok("i have not seen any other movies by that director");
    f.pred_off = 2;
    f.neg_pred_off = 3;
    f.arg1_begin = 3;
    f.arg1_end = 8;
  } else {
    const auto& cat = categories()[rng.next_below(categories().size())];
    std::string ent = draw_entity(rng, cat);
    f.system = tok("do you " + std::string(cat.verb) + " " + ent);
    f.echo = tok("i " + std::string(cat.verb) + " " + ent);
    f.neg_echo = tok("i do not " + std::string(cat.verb) + " " + ent);
    f.pred_off = 1;
    f.neg_pred_off = 3;
    f.arg1_begin = 2;
    f.arg1_end = 2;
  }
  return f;
}

// Frame over `prefix ++ echo`, where echo keeps standard SVO order.
SrlAnnotation echo_frame(const DoYouForm& f, std::size_t prefix, bool negated) {
  std::size_t shift = negated ? f.neg_pred_off - f.pred_off : 0;
  std::size_t len = prefix + (negated ? f.neg_echo.size() : f.echo.size());
  std::size_t pred = prefix + f.pred_off + shift;
  std::size_t a1b = prefix + f.arg1_begin + shift;
  std::size_t a1e = prefix + f.arg1_end + shift;
  return utterance_frame(len, {pred, pred},
                         {{"ARG0", prefix, prefix}, {"ARG1", a1b, a1e}});
}

Scenario do_you_answer(Rng& rng, bool positive) {
  DoYouForm f = draw_do_you_form(rng, true);
  Scenario s;
  s.system = f.system;
  if (positive) {
    s.source = {rng.next_double() < 0.5 ? "yes" : "yeah"};
    s.da = {"positive_answer"};
    s.reference = s.source;
    s.reference.insert(s.reference.end(), f.echo.begin(), f.echo.end());
    s.frames_comp = {echo_frame(f, 1, false)};
  } else {
    bool shrug = rng.next_double() < 0.4;
    s.source = shrug ? tok("not really") : std::vector<std::string>{"no"};
    s.da = {"negative_answer"};
    s.reference = s.source;
    s.reference.insert(s.reference.end(), f.neg_echo.begin(), f.neg_echo.end());
    s.frames_comp = {echo_frame(f, s.source.size(), true)};
  }
  s.frames_orig = {};  // nothing taggable in a bare yes/no
  return s;
}

Scenario hold_pause(Rng& rng) {
  // ASR cut the turn after a filler; the completion scheme restates the
  // question anyway, which is exactly the noisy-completion case.
  DoYouForm f = draw_do_you_form(rng, false);
  Scenario s;
  s.system = f.system;
  s.source = {"okay"};
  s.da = {"hold"};
  s.reference = {"okay"};
  s.reference.insert(s.reference.end(), f.echo.begin(), f.echo.end());
  s.frames_orig = {};
  s.frames_comp = {echo_frame(f, 1, false)};
  return s;
}

Scenario how_often(Rng& rng) {
  const auto& act = activities()[rng.next_below(activities().size())];
  const auto& tmp = tmp_phrases()[rng.next_below(tmp_phrases().size())];
  Scenario s;
  s.system = tok("how often do you " + std::string(act.verb) + " " + act.object);
  for (const char* t : tmp) s.source.push_back(t);
  s.reference = tok("i " + std::string(act.verb) + " " + act.object);
  s.reference.insert(s.reference.end(), s.source.begin(), s.source.end());
  s.da = {"statement"};
  s.frames_orig = {context_frame(s.source.size(), {{"ARGM-TMP", 0, s.source.size() - 1}})};
  s.frames_comp = {utterance_frame(
      s.reference.size(), {1, 1},
      {{"ARG0", 0, 0}, {"ARG1", 2, 2}, {"ARGM-TMP", 3, s.reference.size() - 1}})};
  return s;
}

Scenario or_choice(Rng& rng) {
  const auto& cat = categories()[rng.next_below(categories().size())];
  std::string a = draw_entity(rng, cat), b = draw_entity(rng, cat);
  while (b == a) b = draw_entity(rng, cat);
  std::string chosen = rng.next_double() < 0.5 ? a : b;
  Scenario s;
  s.system = tok("do you prefer " + a + " or " + b);
  s.source = {chosen};
  s.reference = tok("i prefer " + chosen);
  s.da = {"opinion"};
  s.frames_orig = {context_frame(1, {{"ARG1", 0, 0}})};
  s.frames_comp = {utterance_frame(3, {1, 1}, {{"ARG0", 0, 0}, {"ARG1", 2, 2}})};
  return s;
}

// Answers that carry their own verb ("read books"): the original utterance
// has a predicate, while the completion re-attaches the phrase under
// "prefer", which is where the completed-path parse and the original-path
// parse genuinely disagree. The annotators wavered over an article inside
// the restated phrase ("to read books" vs "to read the books"), so the
// completion target is two-way ambiguous and the decoder posterior inside
// that argument stays well below 1.
Scenario or_choice_verb(Rng& rng) {
  const auto& a = activities()[rng.next_below(activities().size())];
  const auto& b = activities()[rng.next_below(activities().size())];
  const Activity& chosen = rng.next_double() < 0.5 ? a : b;
  bool with_article = rng.next_double() >= 0.7;
  Scenario s;
  s.system = tok(std::string("do you prefer to ") + a.verb + " " + a.object + " or " +
                 b.verb + " " + b.object);
  s.source = tok(std::string(chosen.verb) + " " + chosen.object);
  s.da = {"opinion"};
  s.frames_orig = {utterance_frame(2, {0, 0}, {{"ARG1", 1, 1}})};
  if (!with_article) {
    s.reference = tok(std::string("i prefer to ") + chosen.verb + " " + chosen.object);
    s.frames_comp = {utterance_frame(5, {1, 1}, {{"ARG0", 0, 0}, {"ARG1", 2, 4}}),
                     utterance_frame(5, {3, 3}, {{"ARG1", 4, 4}})};
  } else {
    s.reference =
        tok(std::string("i prefer to ") + chosen.verb + " the " + chosen.object);
    s.frames_comp = {utterance_frame(6, {1, 1}, {{"ARG0", 0, 0}, {"ARG1", 2, 5}}),
                     utterance_frame(6, {3, 3}, {{"ARG1", 4, 5}})};
  }
  return s;
}

Scenario or_choice_loc(Rng& rng) {
  bool home = rng.next_double() < 0.5;
  Scenario s;
  s.system = tok("do you prefer to watch movies in the theater or at home");
  s.source = home ? tok("at home") : tok("in the theater");
  s.reference = tok("i prefer to watch movies");
  s.reference.insert(s.reference.end(), s.source.begin(), s.source.end());
  s.da = {"opinion"};
  s.frames_orig = {context_frame(s.source.size(), {{"ARGM-LOC", 0, s.source.size() - 1}})};
  s.frames_comp = {utterance_frame(
      s.reference.size(), {3, 3},
      {{"ARG1", 4, 4}, {"ARGM-LOC", 5, s.reference.size() - 1}})};
  return s;
}

Scenario how_feel(Rng& rng) {
  static const char* things[] = {"music",  "art",   "coffee", "chocolate",
                                 "football", "books", "television", "candy"};
  std::string thing = things[rng.next_below(8)];
  std::string feel = feeling_pool()[rng.next_below(feeling_pool().size())];
  Scenario s;
  s.system = tok("if " + thing + " were removed from the world how would you feel");
  s.source = {feel};
  s.reference = tok("i would feel " + feel);
  s.da = {"opinion"};
  s.frames_orig = {context_frame(1, {{"ARG1", 0, 0}})};
  s.frames_comp = {utterance_frame(4, {2, 2}, {{"ARG0", 0, 0}, {"ARG1", 3, 3}})};
  return s;
}

Scenario open_question(Rng& rng) {
  std::string a = topic_pool()[rng.next_below(topic_pool().size())];
  std::string b = topic_pool()[rng.next_below(topic_pool().size())];
  while (b == a) b = topic_pool()[rng.next_below(topic_pool().size())];
  Scenario s;
  s.system = tok("do you want to talk about " + a);
  s.source = tok("how about " + b);
  s.reference = tok("how about talking about " + b);
  s.da = {"open_question_opinion"};
  s.frames_orig = {context_frame(3, {{"ARG1", 2, 2}})};
  s.frames_comp = {utterance_frame(5, {2, 3}, {{"ARG1", 4, 4}})};
  return s;
}

Scenario subordinate(Rng& rng) {
  const auto& cat = categories()[rng.next_below(categories().size())];
  std::string noun = sub_nouns()[rng.next_below(sub_nouns().size())];
  std::string verb = sub_verbs()[rng.next_below(sub_verbs().size())];
  Scenario s;
  s.system = tok("what part did you like best about that " + std::string(cat.name));
  s.source = tok("when the " + noun + " did " + verb);
  s.reference = tok("the part i liked best is when the " + noun + " did " + verb);
  s.da = {"statement"};
  // layer 1: whole clause stands in for the elided object; layer 2: the
  // clause-internal predicate forms its own frame
  s.frames_orig = {context_frame(5, {{"ARG1", 0, 4}}),
                   utterance_frame(5, {3, 4}, {{"ARG0", 1, 2}})};
  s.frames_comp = {utterance_frame(11, {5, 5}, {{"ARG1", 6, 10}}),
                   utterance_frame(11, {9, 10}, {{"ARG0", 7, 8}})};
  return s;
}

Scenario complete_statement(Rng& rng) {
  Scenario s = what_favorite(rng);
  s.source = s.reference;
  s.frames_orig = s.frames_comp;
  s.da = {"statement"};
  return s;
}

Scenario complete_yes_no(Rng& rng, bool positive) {
  DoYouForm f = draw_do_you_form(rng, true);
  Scenario s;
  s.system = f.system;
  if (positive) {
    std::string lead = rng.next_double() < 0.35 ? "okay" : "yes";
    s.da = {"positive_answer", "statement"};
    s.source = {lead};
    s.source.insert(s.source.end(), f.echo.begin(), f.echo.end());
    s.frames_orig = {echo_frame(f, 1, false)};
  } else {
    s.da = {"negative_answer", "statement"};
    s.source = {"no"};
    s.source.insert(s.source.end(), f.neg_echo.begin(), f.neg_echo.end());
    s.frames_orig = {echo_frame(f, 1, true)};
  }
  s.reference = s.source;
  s.frames_comp = s.frames_orig;
  return s;
}

Scenario comment_reaction(Rng& rng) {
  const auto& cat = categories()[rng.next_below(categories().size())];
  static const char* adjs[] = {"great", "scary", "funny", "boring", "lovely"};
  std::string adj = adjs[rng.next_below(5)];
  std::string react = reaction_pool()[rng.next_below(reaction_pool().size())];
  Scenario s;
  s.system = rng.next_double() < 0.5
                 ? tok("i watched a " + adj + " " + std::string(cat.name) + " yesterday")
                 : tok("that is a " + adj + " " + std::string(cat.name));
  s.source = {react};
  s.reference = s.source;
  s.da = {"comment"};
  return s;
}

Scenario statement_full(Rng& rng) {
  Scenario s = how_often(rng);
  s.source = s.reference;
  s.frames_orig = s.frames_comp;
  s.da = {"statement"};
  return s;
}

Scenario backchannel(Rng& rng) {
  const auto& cat = categories()[rng.next_below(categories().size())];
  Scenario s;
  s.system = tok("i could talk about " + std::string(cat.name) + "s all day");
  s.source = rng.next_double() < 0.5 ? tok("uh huh") : tok("mhm");
  s.reference = s.source;
  s.da = {"back_channeling"};
  return s;
}

using ScenarioFn = Scenario (*)(Rng&);

Scenario do_you_pos(Rng& rng) { return do_you_answer(rng, true); }
Scenario do_you_neg(Rng& rng) { return do_you_answer(rng, false); }
Scenario complete_yes(Rng& rng) { return complete_yes_no(rng, true); }
Scenario complete_no(Rng& rng) { return complete_yes_no(rng, false); }

std::size_t weighted_pick(Rng& rng,
                          const std::vector<std::pair<ScenarioFn, double>>& table) {
  double r = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    acc += table[i].second;
    if (r < acc) return i;
  }
  return table.size() - 1;
}

const std::vector<std::pair<ScenarioFn, double>>& ellipsis_table() {
  static const std::vector<std::pair<ScenarioFn, double>> v = {
      {what_favorite, 0.14}, {talk_about, 0.09},  {do_you_pos, 0.12},
      {do_you_neg, 0.06},    {how_often, 0.10},   {or_choice, 0.08},
      {or_choice_verb, 0.07}, {or_choice_loc, 0.04}, {how_feel, 0.08},
      {open_question, 0.05}, {subordinate, 0.05},  {hold_pause, 0.12}};
  return v;
}

const std::vector<std::pair<ScenarioFn, double>>& modified_table() {
  static const std::vector<std::pair<ScenarioFn, double>> v = {
      {what_favorite, 0.30}, {or_choice, 0.25}, {how_often, 0.20},
      {how_feel, 0.15},      {talk_about, 0.10}};
  return v;
}

const std::vector<std::pair<ScenarioFn, double>>& complete_table() {
  static const std::vector<std::pair<ScenarioFn, double>> v = {
      {complete_statement, 0.26}, {complete_yes, 0.28}, {complete_no, 0.10},
      {comment_reaction, 0.18},   {statement_full, 0.13}, {backchannel, 0.05}};
  return v;
}

bool is_subsequence(const std::vector<std::string>& small,
                    const std::vector<std::string>& big) {
  std::size_t i = 0;
  for (const auto& t : big)
    if (i < small.size() && t == small[i]) ++i;
  return i == small.size();
}

}  // namespace

LabelInventory default_act_inventory() {
  return LabelInventory::from_names(
      {"statement",           "opinion",        "positive_answer",
       "negative_answer",     "comment",        "hold",
       "open_question_factual", "open_question_opinion", "yes_no_question",
       "back_channeling",     "command",        "complaint",
       "apology",             "thanking",       "nonsense",
       "incomplete",          "opening",        "closing",
       "appreciation",        "abandon",        "other_answers",
       "dev_command",         "clarifying_question"});
}

std::vector<std::string> default_srl_roles() {
  return {"ARG0", "ARG1", "ARG2", "ARG3", "ARG4", "ARGM-TMP", "ARGM-LOC", "ARGM-MNR"};
}

SyntheticCorpora generate_synthetic(uint64_t seed, std::size_t n,
                                    const SyntheticMix& mix) {
  double total = mix.had_ellipsis + mix.modified_to_ellipsis + mix.already_complete;
  if (mix.had_ellipsis < 0 || mix.modified_to_ellipsis < 0 || mix.already_complete < 0 ||
      std::abs(total - 1.0) > 1e-9)
    throw CorpusError("invalid mix: case proportions must be nonnegative and sum to 1");

  LabelInventory acts = default_act_inventory();
  Rng rng = Rng::substream(seed, "synthetic");
  SyntheticCorpora out;

  for (std::size_t i = 0; i < n; ++i) {
    double r = rng.next_double();
    Scenario sc;
    if (r < mix.had_ellipsis) {
      const auto& table = ellipsis_table();
      sc = table[weighted_pick(rng, table)].first(rng);
      sc.ccase = CompletionCase::had_ellipsis;
    } else if (r < mix.had_ellipsis + mix.modified_to_ellipsis) {
      const auto& table = modified_table();
      sc = table[weighted_pick(rng, table)].first(rng);
      sc.ccase = CompletionCase::modified_to_ellipsis;
    } else {
      const auto& table = complete_table();
      sc = table[weighted_pick(rng, table)].first(rng);
      sc.ccase = CompletionCase::already_complete;
      sc.source = sc.reference;  // scheme case 3
    }
    assert(is_subsequence(sc.source, sc.reference));
    for (const auto& fr : sc.frames_orig) assert(bio_valid(fr.tags));
    for (const auto& fr : sc.frames_comp) assert(bio_valid(fr.tags));

    std::vector<DialogTurn> ctx{{Speaker::system, sc.system}};

    CompletionExample ce;
    ce.context = ctx;
    ce.source = sc.source;
    ce.reference = sc.reference;
    ce.completion_case = sc.ccase;
    out.completion.push_back(std::move(ce));

    DAExample de;
    de.context = ctx;
    de.utterance = sc.source;
    for (const auto& name : sc.da) de.labels.push_back(acts.id(name));
    std::sort(de.labels.begin(), de.labels.end());
    DAExample dc = de;
    dc.utterance = sc.reference;
    out.da.push_back(std::move(de));
    out.da_completed.push_back(std::move(dc));

    SRLExample se;
    se.context = ctx;
    se.utterance = sc.source;
    se.frames = sc.frames_orig;
    SRLExample se_c;
    se_c.context = ctx;
    se_c.utterance = sc.reference;
    se_c.frames = sc.frames_comp;
    out.srl.push_back(std::move(se));
    out.srl_completed.push_back(std::move(se_c));
  }
  return out;
}

}  // namespace elcmp
