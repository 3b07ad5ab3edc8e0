#include "ocs/selector.hpp"

namespace ocs {

namespace {

// Replays a fixed prefix of choices. The first choose() past the end of the
// script records the branch probabilities at that point; the rest of the run
// is garbage and gets discarded by the caller.
class ScriptedChoice final : public ChoiceSource {
public:
    explicit ScriptedChoice(const std::vector<std::size_t>& script) : script_(script) {}

    std::size_t choose(std::span<const double> probs) override {
        if (probs.size() == 1) return 0;
        if (pos_ < script_.size()) {
            std::size_t i = script_[pos_++];
            prob_ *= probs[i];
            return i;
        }
        if (!overran_) {
            overran_ = true;
            frontier_.assign(probs.begin(), probs.end());
        }
        return 0;
    }

    bool overran() const { return overran_; }
    double prob() const { return prob_; }
    const std::vector<double>& frontier() const { return frontier_; }

private:
    const std::vector<std::size_t>& script_;
    std::size_t pos_ = 0;
    double prob_ = 1.0;
    bool overran_ = false;
    std::vector<double> frontier_;
};

} // namespace

std::vector<Branch> Selector::enumerate(const Round& round) const {
    const std::string pre = snapshot();
    std::unique_ptr<Selector> work = clone();

    std::vector<Branch> out;
    std::vector<std::vector<std::size_t>> stack;
    stack.push_back({});
    while (!stack.empty()) {
        std::vector<std::size_t> script = std::move(stack.back());
        stack.pop_back();

        work->restore(pre);
        ScriptedChoice src(script);
        ElemId elem = work->do_step(round, src);
        if (!src.overran()) {
            out.push_back(Branch{src.prob(), elem, work->snapshot()});
        } else {
            const auto& probs = src.frontier();
            for (std::size_t i = probs.size(); i-- > 0;) {
                if (probs[i] <= 0.0) continue;
                std::vector<std::size_t> ext = script;
                ext.push_back(i);
                stack.push_back(std::move(ext));
            }
        }
    }
    return out;
}

Trace run(Selector& sel, const RoundSeq& rounds, Rng& rng) {
    sel.reset();
    Trace trace;
    trace.selections.reserve(rounds.size());
    for (const Round& r : rounds) trace.selections.push_back(sel.step(r, rng));
    return trace;
}

} // namespace ocs
