#!/usr/bin/env python3
"""Regenerate the sample corpus, its hand-annotated parses and golden files.

Every parse below was annotated by hand following UD 2 guidelines. The golden
head-noun and graph files are computed here by a separate Python
implementation of the extraction rules, so the C++ tests compare two
independent codings of the same rules.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

# form/lemma/UPOS/head/deprel
BANK = {
    "saw_anna": "I/I/PRON/2/nsubj saw/see/VERB/0/root Anna/Anna/PROPN/2/obj ././PUNCT/2/punct",
    "argued": "We/we/PRON/2/nsubj argued/argue/VERB/0/root ././PUNCT/2/punct",
    "maria_doctor": "Maria/Maria/PROPN/2/nsubj called/call/VERB/0/root the/the/DET/4/det doctor/doctor/NOUN/2/obj ././PUNCT/2/punct",
    "sister_doctor": "My/my/PRON/2/nmod:poss sister/sister/NOUN/3/nsubj called/call/VERB/0/root the/the/DET/5/det doctor/doctor/NOUN/3/obj ././PUNCT/3/punct",
    "sisters_doctor": "My/my/PRON/2/nmod:poss sister/sister/NOUN/4/nmod:poss 's/'s/PART/2/case doctor/doctor/NOUN/5/nsubj called/call/VERB/0/root ././PUNCT/5/punct",
    "go_away": "Go/go/VERB/0/root away/away/ADV/1/advmod !/!/PUNCT/1/punct",
    "maria_cried": "Maria/Maria/PROPN/2/nsubj cried/cry/VERB/0/root ././PUNCT/2/punct",
    "dog_barked": "The/the/DET/2/det dog/dog/NOUN/3/nsubj barked/bark/VERB/0/root all/all/DET/5/det night/night/NOUN/3/obl:tmod ././PUNCT/3/punct",
    "walked_dog": "I/I/PRON/2/nsubj walked/walk/VERB/0/root that/that/DET/4/det dog/dog/NOUN/2/obj ././PUNCT/2/punct",
    "boss_job": "My/my/PRON/2/nmod:poss boss/boss/NOUN/3/nsubj gave/give/VERB/0/root my/my/PRON/5/nmod:poss sister/sister/NOUN/3/iobj a/a/DET/7/det job/job/NOUN/3/obj ././PUNCT/3/punct",
    "was_sad": "I/I/PRON/3/nsubj was/be/AUX/3/cop sad/sad/ADJ/0/root ././PUNCT/3/punct",
    "meeting_cancelled": "The/the/DET/2/det meeting/meeting/NOUN/4/nsubj:pass was/be/AUX/4/aux:pass cancelled/cancel/VERB/0/root ././PUNCT/4/punct",
    "luca_helped": "Luca/Luca/PROPN/2/nsubj helped/help/VERB/0/root my/my/PRON/4/nmod:poss mother/mother/NOUN/2/obj with/with/ADP/7/case the/the/DET/7/det shopping/shopping/NOUN/2/obl ././PUNCT/2/punct",
    "office_rejected": "The/the/DET/3/det city/city/NOUN/3/compound office/office/NOUN/4/nsubj rejected/reject/VERB/0/root my/my/PRON/6/nmod:poss request/request/NOUN/4/obj ././PUNCT/4/punct",
    "giulia_told": "Giulia/Giulia/PROPN/2/nsubj told/tell/VERB/0/root me/I/PRON/2/iobj the/the/DET/5/det news/news/NOUN/2/obj ././PUNCT/2/punct",
    "marco_moved": "My/my/PRON/2/nmod:poss friend/friend/NOUN/4/nsubj Marco/Marco/PROPN/2/appos moved/move/VERB/0/root to/to/ADP/6/case Rome/Rome/PROPN/4/obl ././PUNCT/4/punct",
    "new_job": "I/I/PRON/2/nsubj started/start/VERB/0/root a/a/DET/5/det new/new/ADJ/5/amod job/job/NOUN/2/obj ././PUNCT/2/punct",
    "lost_wallet": "My/my/PRON/2/nmod:poss brother/brother/NOUN/3/nsubj lost/lose/VERB/0/root his/his/PRON/5/nmod:poss wallet/wallet/NOUN/3/obj ././PUNCT/3/punct",
    "visited_grandmother": "We/we/PRON/2/nsubj visited/visit/VERB/0/root my/my/PRON/4/nmod:poss grandmother/grandmother/NOUN/2/obj in/in/ADP/6/case Naples/Naples/PROPN/2/obl ././PUNCT/2/punct",
    "exam_went": "The/the/DET/2/det exam/exam/NOUN/3/nsubj went/go/VERB/0/root badly/badly/ADV/3/advmod ././PUNCT/3/punct",
    "cooked_dinner": "I/I/PRON/2/nsubj cooked/cook/VERB/0/root dinner/dinner/NOUN/2/obj for/for/ADP/5/case Anna/Anna/PROPN/2/obl ././PUNCT/2/punct",
    "anna_loved": "Anna/Anna/PROPN/2/nsubj loved/love/VERB/0/root the/the/DET/4/det dinner/dinner/NOUN/2/obj ././PUNCT/2/punct",
    "daughter_won": "My/my/PRON/2/nmod:poss daughter/daughter/NOUN/3/nsubj won/win/VERB/0/root the/the/DET/5/det race/race/NOUN/3/obj ././PUNCT/3/punct",
    "miss_father": "I/I/PRON/2/nsubj miss/miss/VERB/0/root my/my/PRON/4/nmod:poss father/father/NOUN/2/obj ././PUNCT/2/punct",
    "doctor_pills": "The/the/DET/2/det doctor/doctor/NOUN/3/nsubj gave/give/VERB/0/root me/I/PRON/3/iobj some/some/DET/6/det pills/pill/NOUN/3/obj ././PUNCT/3/punct",
    "rained": "It/it/PRON/2/expl rained/rain/VERB/0/root all/all/DET/4/det weekend/weekend/NOUN/2/obl:tmod ././PUNCT/2/punct",
    "painted_kitchen": "Paolo/Paolo/PROPN/4/nsubj and/and/CCONJ/3/cc I/I/PRON/1/conj painted/paint/VERB/0/root the/the/DET/6/det kitchen/kitchen/NOUN/4/obj ././PUNCT/4/punct",
    "cat_sick": "My/my/PRON/2/nmod:poss cat/cat/NOUN/4/nsubj is/be/AUX/4/cop sick/sick/ADJ/0/root ././PUNCT/4/punct",
    "vet_examined": "The/the/DET/2/det vet/vet/NOUN/3/nsubj examined/examine/VERB/0/root my/my/PRON/5/nmod:poss cat/cat/NOUN/3/obj ././PUNCT/3/punct",
    "passed_test": "I/I/PRON/2/nsubj passed/pass/VERB/0/root the/the/DET/5/det driving/driving/NOUN/5/compound test/test/NOUN/2/obj ././PUNCT/2/punct",
    "marco_called": "Marco/Marco/PROPN/2/nsubj called/call/VERB/0/root me/I/PRON/2/obj ././PUNCT/2/punct",
}

NO_SPACE_BEFORE = {".", "!", "?", ",", "'s"}


def parse_cells(key):
    out = []
    for i, cell in enumerate(BANK[key].split(), start=1):
        parts = cell.rsplit("/", 3)
        head_part = parts[0]
        upos, head, deprel = parts[1], int(parts[2]), parts[3]
        form, lemma = head_part.split("/", 1)
        if form in (".", "!"):
            lemma = form
        out.append({"id": i, "form": form, "lemma": lemma, "upos": upos, "head": head, "deprel": deprel})
    return out


def sentence_text(toks):
    text = ""
    for t in toks:
        if text and t["form"] not in NO_SPACE_BEFORE:
            text += " "
        text += t["form"]
    return text


# Dialogue blueprints: first-session user turns as lists of sentence keys.
FIRST = [
    [["saw_anna", "argued"], ["anna_loved"]],
    [["maria_doctor"], ["sister_doctor"]],
    [["sisters_doctor"], ["doctor_pills"]],
    [["dog_barked"], ["walked_dog"]],
    [["boss_job"], ["new_job"]],
    [["was_sad", "meeting_cancelled"], ["go_away"]],
    [["luca_helped"], ["miss_father"]],
    [["office_rejected"], ["giulia_told"]],
    [["marco_moved"], ["marco_called"]],
    [["lost_wallet"], ["exam_went"]],
    [["visited_grandmother"], ["rained"]],
    [["cooked_dinner", "anna_loved"], ["saw_anna"]],
    [["daughter_won"], ["was_sad"]],
    [["painted_kitchen"], ["cat_sick", "vet_examined"]],
    [["passed_test"], ["new_job"]],
    [["maria_cried"], ["maria_doctor"]],
    [["go_away"], ["walked_dog", "dog_barked"]],
    [["giulia_told", "argued"], ["marco_called"]],
    [["rained"], ["cat_sick"]],
    [["doctor_pills", "miss_father"], ["sister_doctor", "boss_job"]],
]

AGENT_OPENERS = [
    "How was your week?",
    "What have you been up to lately?",
    "Tell me about your family.",
    "How are things at home?",
]
AGENT_FOLLOWUPS = [
    "That sounds important. How did it go afterwards?",
    "I see. What happened next?",
    "How did that make you feel?",
]
SECOND_USER = [
    "Hi again, I have some news.",
    "Things are a bit better now.",
    "I thought about what we discussed.",
    "It was a long week.",
    "Not much has changed since last time.",
]
SECOND_AGENT = [
    "Welcome back! Last time you mentioned your family, how are they?",
    "I remember you told me about the doctor. Is everyone feeling better?",
    "Did things work out with the job in the end?",
    "How is Anna doing these days?",
    "I hope the weekend was more relaxing this time.",
]


def first_session(i, plan):
    turns = [{"speaker": "agent", "text": AGENT_OPENERS[i % len(AGENT_OPENERS)]}]
    user_turn_sentences = []
    for k, keys in enumerate(plan):
        toks = [parse_cells(key) for key in keys]
        turns.append({"speaker": "user", "text": " ".join(sentence_text(t) for t in toks)})
        user_turn_sentences.append((len(turns) - 1, keys, toks))
        if k + 1 < len(plan):
            turns.append({"speaker": "agent", "text": AGENT_FOLLOWUPS[(i + k) % len(AGENT_FOLLOWUPS)]})
    return turns, user_turn_sentences


def second_session(i):
    # Alternate shapes so some dialogues open with the agent (skipped target).
    n_agent = 3 if i % 4 == 0 else 2
    turns = []
    if i % 2 == 0:
        turns.append({"speaker": "agent", "text": SECOND_AGENT[i % len(SECOND_AGENT)]})
    for k in range(n_agent):
        turns.append({"speaker": "user", "text": SECOND_USER[(i + k) % len(SECOND_USER)]})
        turns.append({"speaker": "agent", "text": SECOND_AGENT[(i + k + 1) % len(SECOND_AGENT)]})
    return turns


def head_nouns(sentences):
    out = []
    for toks in sentences:
        for t in toks:
            if t["upos"] not in ("NOUN", "PROPN"):
                continue
            if t["head"] and toks[t["head"] - 1]["upos"] in ("NOUN", "PROPN"):
                continue
            lemma = t["lemma"].lower()
            if lemma not in out:
                out.append(lemma)
    return out


def psg_linear(sentences):
    events = []
    for toks in sentences:
        for verb in toks:
            if verb["upos"] != "VERB":
                continue
            deps = [t for t in toks if t["head"] == verb["id"]]
            subj = next((t for t in deps if t["deprel"] in ("nsubj", "nsubj:pass")), None)
            obj = next((t for t in deps if t["deprel"] == "obj"), None) or next(
                (t for t in deps if t["deprel"] == "iobj"), None)
            if subj is None and obj is None:
                continue
            triple = (verb["lemma"].lower(), subj and subj["lemma"].lower(), obj and obj["lemma"].lower())
            if triple not in events:
                events.append(triple)
    parts = []
    for pred, subj, obj in events:
        parts += ["[E]", pred]
        if subj:
            parts += ["[S]", subj]
        if obj:
            parts += ["[O]", obj]
    return " ".join(parts)


def main():
    pairs, conllu, boh, psg = [], [], [], []
    for i, plan in enumerate(FIRST):
        did = "d%02d" % (i + 1)
        turns, user_turns = first_session(i, plan)
        pairs.append({
            "dialogue_id": did,
            "user_id": "u%02d" % (i % 7 + 1),
            "sessions": [
                {"session_index": 1, "turns": turns},
                {"session_index": 2, "turns": second_session(i)},
            ],
        })
        all_sentences = []
        for turn_index, keys, toks_list in user_turns:
            for key, toks in zip(keys, toks_list):
                all_sentences.append(toks)
                conllu.append("# sent_id = %s-%d-%s" % (did, turn_index, key))
                conllu.append("# dialogue_id = %s" % did)
                conllu.append("# session = 1")
                conllu.append("# turn = %d" % turn_index)
                conllu.append("# text = %s" % sentence_text(toks))
                for t in toks:
                    conllu.append("\t".join([str(t["id"]), t["form"], t["lemma"], t["upos"], "_", "_",
                                             str(t["head"]), t["deprel"], "_", "_"]))
                conllu.append("")
        boh.append("%s\t%s" % (did, " ".join(head_nouns(all_sentences))))
        psg.append("%s\t%s" % (did, psg_linear(all_sentences)))

    sample = ROOT / "data" / "sample"
    sample.mkdir(parents=True, exist_ok=True)
    with open(sample / "corpus.jsonl", "w", encoding="utf-8") as f:
        f.write(json.dumps({"schema": "ldwb.corpus", "version": 1}, sort_keys=True) + "\n")
        for p in pairs:
            f.write(json.dumps(p, sort_keys=True, ensure_ascii=False) + "\n")
    with open(sample / "parses.conllu", "w", encoding="utf-8") as f:
        f.write("# tagset = UD 2, hand-annotated\n")
        f.write("\n".join(conllu) + "\n")
    fixtures = ROOT / "tests" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    (fixtures / "sample_boh_golden.tsv").write_text("\n".join(boh) + "\n", encoding="utf-8")
    (fixtures / "sample_psg_golden.tsv").write_text("\n".join(psg) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
