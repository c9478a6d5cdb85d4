"""Regenerate the bundled offline fixture set under src/dip/fixtures/.

The source-language texts are small synthetic examples, not benchmark data.
Model responses are synthesized deterministically from a hash of
(language, item, strategy) so every strategy gets a different accuracy
profile; they are stored in a replay store keyed exactly as the client keys
live requests.

Usage: python tools/make_fixtures.py
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from dip.datasets import item_from_json
from dip.lexicon import Lexicon, LexiconEntry, dump_lexicon
from dip.llm_client import CompletionParams, cache_key
from dip.prompts import PromptStrategy, build_prompt

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "src" / "dip" / "fixtures"

LANGS = ("kaz_Cyrl", "bug_Latn")
PROVIDER_ID = "replay"
PARAMS = CompletionParams(model="fixture-model", temperature=0.0, max_output_tokens=512)
TIMESTAMP = "2024-01-01T00:00:00+00:00"

# id, english, {lang: question}, gold, rationale, choices
ITEMS = {
    "gsm8k": [
        ("g1", "Mary buys 3 apples. Each apple costs 2 dollars. How much does she pay?",
         {"kaz_Cyrl": "Мария 3 алма сатып алды. Әр алма 2 доллар тұрады. Ол қанша төлейді?",
          "bug_Latn": "Mary melli 3 apel. Tungke apel ellinna 2 dolar. Siaga nabayara?"},
         6, "Each apple costs 2 dollars. So 3 apples cost 3 * 2 = 6 dollars. The answer is 6.", None),
        ("g2", "Tom has 12 eggs. He eats 4 eggs. How many eggs are left?",
         {"kaz_Cyrl": "Томда 12 жұмыртқа бар. Ол 4 жұмыртқа жейді. Қанша жұмыртқа қалды?",
          "bug_Latn": "Tom punnai 12 tello'. Nanrei 4 tello'. Siaga tello' tersisa?"},
         8, "Tom starts with 12 eggs and eats 4 eggs. 12 - 4 = 8 eggs are left. The answer is 8.", None),
        ("g3", "A farmer has 5 cows and 7 goats. How many animals does he have?",
         {"kaz_Cyrl": "Фермерде 5 сиыр және 7 ешкі бар. Оның қанша жануары бар?",
          "bug_Latn": "Pallaonruma punnai 5 tedong na 7 bembe. Siaga olo'-kolo'na?"},
         12, "The farmer has 5 cows and 7 goats. 5 + 7 = 12 animals. The answer is 12.", None),
        ("g4", "A shop sells 1,200 books in 4 days. How many books does it sell each day?",
         {"kaz_Cyrl": "Дүкен 4 күнде 1200 кітап сатады. Ол күніне қанша кітап сатады?",
          "bug_Latn": "Toko'e mabbalu 1200 kitta' ri laleng 4 esso. Siaga kitta' nabbalu tungke esso?"},
         300, "The shop sells 1,200 books in 4 days. 1,200 / 4 = 300 books each day. The answer is 300.", None),
    ],
    "svamp": [
        ("s1", "There are 9 birds on a tree. 3 birds fly away. How many birds are on the tree now?",
         {"kaz_Cyrl": "Ағашта 9 құс бар. 3 құс ұшып кетті. Қазір ағашта қанша құс бар?",
          "bug_Latn": "Engka 9 manu'-manu' ri aju'e. 3 manu'-manu' lettu. Siaga manu'-manu' ri aju'e makkekkuannangngé?"},
         6, "There are 9 birds and 3 fly away. 9 - 3 = 6 birds remain. The answer is 6.", None),
        ("s2", "Ali has 4 boxes with 5 pens in each box. How many pens does Ali have?",
         {"kaz_Cyrl": "Әлиде 4 қорап бар, әр қорапта 5 қалам бар. Әлиде қанша қалам бар?",
          "bug_Latn": "Ali punnai 4 kotak, tungke kotak engka 5 pulpen. Siaga pulpen punnana Ali?"},
         20, "Ali has 4 boxes with 5 pens each. 4 * 5 = 20 pens. The answer is 20.", None),
        ("s3", "A bus has 30 seats. 18 seats are full. How many seats are empty?",
         {"kaz_Cyrl": "Автобуста 30 орын бар. 18 орын бос емес. Қанша орын бос?",
          "bug_Latn": "Bis'e punnai 30 onrong. 18 onrong ponno. Siaga onrong lobbang?"},
         12, "The bus has 30 seats and 18 are full. 30 - 18 = 12 seats are empty. The answer is 12.", None),
        ("s4", "Sara reads 6 pages every day for 5 days. How many pages does she read?",
         {"kaz_Cyrl": "Сара 5 күн бойы күн сайын 6 бет оқиды. Ол қанша бет оқиды?",
          "bug_Latn": "Sara mabbaca 6 lembar tungke esso ri laleng 5 esso. Siaga lembar nabaca?"},
         30, "Sara reads 6 pages a day for 5 days. 6 * 5 = 30 pages. The answer is 30.", None),
    ],
    "aqua": [
        ("a1", "A train travels 60 km in 1 hour. How far does it travel in 3 hours?",
         {"kaz_Cyrl": "Пойыз 1 сағатта 60 км жүреді. Ол 3 сағатта қанша жол жүреді?",
          "bug_Latn": "Kareta'e lao 60 km ri laleng 1 jang. Siaga mabela lao ri laleng 3 jang?"},
         "C", "In 1 hour the train travels 60 km. In 3 hours it travels 3 * 60 = 180 km. The answer is C.",
         ["120 km", "150 km", "180 km", "200 km", "240 km"]),
        ("a2", "The price of a pen is 5 dollars. What is the price of 8 pens?",
         {"kaz_Cyrl": "Бір қаламның бағасы 5 доллар. 8 қаламның бағасы қанша?",
          "bug_Latn": "Ellinna seddi pulpen 5 dolar. Siaga ellinna 8 pulpen?"},
         "B", "One pen costs 5 dollars. 8 pens cost 8 * 5 = 40 dollars. The answer is B.",
         ["35", "40", "45", "50", "55"]),
        ("a3", "If x + 4 = 10, what is x?",
         {"kaz_Cyrl": "Егер x + 4 = 10 болса, x неге тең?",
          "bug_Latn": "Rékko x + 4 = 10, aga x?"},
         "C", "x + 4 = 10, so x = 10 - 4 = 6. The answer is C.",
         ["4", "5", "6", "7", "14"]),
        ("a4", "A rectangle is 4 m long and 3 m wide. What is its area?",
         {"kaz_Cyrl": "Тіктөртбұрыштың ұзындығы 4 м, ені 3 м. Оның ауданы қанша?",
          "bug_Latn": "Segi empa'e marakka 4 m, malebba 3 m. Siaga luasena?"},
         "B", "The area is length times width. 4 * 3 = 12 square meters. The answer is B.",
         ["7", "12", "14", "16", "24"]),
    ],
    "date": [
        ("d1", "Today is 03/01/2020. What is the date tomorrow in MM/DD/YYYY?",
         {"kaz_Cyrl": "Бүгін 03/01/2020. Ертеңгі күн қандай, MM/DD/YYYY түрінде?",
          "bug_Latn": "Essoé 03/01/2020. Aga tanggala' baja, ri MM/DD/YYYY?"},
         "A", "Today is 03/01/2020. One day later is 03/02/2020. The answer is A.",
         ["03/02/2020", "02/29/2020", "03/01/2021", "04/01/2020", "03/03/2020"]),
        ("d2", "Yesterday was 12/31/2019. What is the date today in MM/DD/YYYY?",
         {"kaz_Cyrl": "Кеше 12/31/2019 болды. Бүгін қандай күн, MM/DD/YYYY түрінде?",
          "bug_Latn": "Wenni 12/31/2019. Aga tanggala' essoé, ri MM/DD/YYYY?"},
         "C", "Yesterday was 12/31/2019, so today is the next day, 01/01/2020. The answer is C.",
         ["01/01/2019", "12/30/2019", "01/01/2020", "01/31/2020", "12/31/2020"]),
        ("d3", "Today is 05/10/2021. What was the date one week ago in MM/DD/YYYY?",
         {"kaz_Cyrl": "Бүгін 05/10/2021. Бір апта бұрын қандай күн болды, MM/DD/YYYY түрінде?",
          "bug_Latn": "Essoé 05/10/2021. Aga tanggala' siminggu riolo, ri MM/DD/YYYY?"},
         "A", "One week is 7 days. 05/10/2021 minus 7 days is 05/03/2021. The answer is A.",
         ["05/03/2021", "05/17/2021", "04/10/2021", "05/09/2021", "05/04/2021"]),
        ("d4", "Jane was born on 02/28/2000. What is the date one day after her birthday in MM/DD/YYYY?",
         {"kaz_Cyrl": "Джейн 02/28/2000 туған. Оның туған күнінен бір күн кейінгі күн қандай, MM/DD/YYYY түрінде?",
          "bug_Latn": "Jane jaji ri 02/28/2000. Aga tanggala' seddi esso purana esso jajinna, ri MM/DD/YYYY?"},
         "B", "2000 is a leap year, so the day after 02/28/2000 is 02/29/2000. The answer is B.",
         ["03/01/2000", "02/29/2000", "02/27/2000", "03/28/2000", "02/28/2001"]),
    ],
    "sports": [
        ("p1", "Is the following sentence plausible? Lionel Messi scored a penalty kick.",
         {"kaz_Cyrl": "Келесі сөйлем шынайы ма? Лионель Месси пенальти соқты.",
          "bug_Latn": "Makkulle ga iyaé ada? Lionel Messi mattama penalti."},
         "plausible", "Lionel Messi is a soccer player, and penalty kicks happen in soccer. So the sentence is plausible.", None),
        ("p2", "Is the following sentence plausible? LeBron James hit a home run.",
         {"kaz_Cyrl": "Келесі сөйлем шынайы ма? Леброн Джеймс хоум-ран соқты.",
          "bug_Latn": "Makkulle ga iyaé ada? LeBron James mappaléppe home run."},
         "implausible", "LeBron James is a basketball player, and a home run happens in baseball. So the sentence is implausible.", None),
        ("p3", "Is the following sentence plausible? Tom Brady threw a touchdown pass.",
         {"kaz_Cyrl": "Келесі сөйлем шынайы ма? Том Брэди тачдаун пасын лақтырды.",
          "bug_Latn": "Makkulle ga iyaé ada? Tom Brady mabbéang passing touchdown."},
         "plausible", "Tom Brady is a football quarterback, and quarterbacks throw touchdown passes. So the sentence is plausible.", None),
        ("p4", "Is the following sentence plausible? Serena Williams scored a touchdown.",
         {"kaz_Cyrl": "Келесі сөйлем шынайы ма? Серена Уильямс тачдаун жасады.",
          "bug_Latn": "Makkulle ga iyaé ada? Serena Williams mappatama touchdown."},
         "implausible", "Serena Williams is a tennis player, and touchdowns happen in football. So the sentence is implausible.", None),
    ],
}

LEXICONS = {
    "kaz_Cyrl": {
        "сатып алды": "bought", "алма": "apple", "әр": "each", "доллар": "dollar", "тұрады": "costs",
        "ол": "he (she)", "қанша": "how many (how much)", "төлейді": "pays", "бар": "there is",
        "жұмыртқа": "egg", "жейді": "eats", "қалды": "remained", "фермерде": "the farmer has",
        "сиыр": "cow", "және": "and", "ешкі": "goat", "оның": "his", "жануары": "animals",
        "дүкен": "shop", "күнде": "in days", "кітап": "book", "сатады": "sells", "күніне": "per day",
        "ағашта": "on the tree", "құс": "bird", "ұшып кетті": "flew away", "қазір": "now",
        "қорап": "box", "қорапта": "in the box", "қалам": "pen", "автобуста": "on the bus",
        "орын": "seat", "бос": "empty", "емес": "not", "күн": "day", "бойы": "for", "күн сайын": "every day",
        "бет": "page", "оқиды": "reads", "пойыз": "train", "сағатта": "in hours", "жүреді": "travels",
        "жол": "distance", "бір": "one", "қаламның": "of pen", "бағасы": "price", "егер": "if",
        "болса": "is", "неге тең": "equals what", "тіктөртбұрыштың": "of the rectangle",
        "ұзындығы": "length", "ені": "width", "ауданы": "area", "бүгін": "today", "ертеңгі": "tomorrow's",
        "қандай": "what", "түрінде": "in format", "кеше": "yesterday", "болды": "was", "апта": "week",
        "бұрын": "ago", "туған": "born", "туған күнінен": "from (her) birthday", "кейінгі": "after",
        "келесі": "following", "сөйлем": "sentence", "шынайы ма": "is plausible", "пенальти": "penalty",
        "соқты": "hit (kicked)", "хоум-ран": "home run", "тачдаун": "touchdown", "пасын": "pass",
        "лақтырды": "threw", "жасады": "made",
    },
    "bug_Latn": {
        "melli": "buy", "apel": "apple", "tungke": "each", "ellinna": "price of", "dolar": "dollar",
        "siaga": "how many (how much)", "nabayara": "does (she) pay", "punnai": "has",
        "tello'": "egg", "nanrei": "eats", "tersisa": "left", "pallaonruma": "farmer",
        "tedong": "buffalo (cow)", "na": "and", "bembe": "goat", "olo'-kolo'na": "his animals",
        "toko'e": "the shop", "mabbalu": "sells", "kitta'": "book", "ri laleng": "in (within)",
        "esso": "day", "nabbalu": "sold", "engka": "there are", "manu'-manu'": "bird", "aju'e": "the tree",
        "ri": "on", "lettu": "fly away", "makkekkuannangngé": "now", "kotak": "box", "pulpen": "pen",
        "punnana": "owned by", "bis'e": "the bus", "onrong": "seat", "ponno": "full", "lobbang": "empty",
        "mabbaca": "reads", "lembar": "page", "nabaca": "read", "kareta'e": "the train", "lao": "travels",
        "jang": "hour", "mabela": "far", "seddi": "one", "rékko": "if", "aga": "what",
        "segi empa'e": "the rectangle", "marakka": "long", "malebba": "wide", "luasena": "its area",
        "essoé": "today", "tanggala'": "date", "baja": "tomorrow", "wenni": "yesterday",
        "siminggu": "one week", "riolo": "ago", "jaji": "born", "purana": "after",
        "esso jajinna": "her birthday", "makkulle ga": "is it possible", "iyaé": "this", "ada": "sentence",
        "mattama": "scored", "penalti": "penalty", "mappaléppe": "hit", "mabbéang": "threw",
        "mappatama": "scored",
    },
}

# Probability (percent) that a synthesized response is correct, per strategy.
ACCURACY = {
    PromptStrategy.STANDARD: 25,
    PromptStrategy.NON_INSERTION: 40,
    PromptStrategy.ENGLISH_PIVOT: 45,
    PromptStrategy.ENGLISH_PIVOT_THOUGHT: 55,
    PromptStrategy.CROSS_LINGUAL_THOUGHT: 50,
    PromptStrategy.DIP_NO_EP_NO_CT: 45,
    PromptStrategy.DIP_EP_NO_CT: 60,
    PromptStrategy.DIP: 80,
}


def _roll(*parts) -> int:
    digest = hashlib.sha256("/".join(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def item_objects():
    out = []
    for dataset, rows in ITEMS.items():
        answer_type = {"gsm8k": "numeric", "svamp": "numeric", "aqua": "choice",
                       "date": "choice", "sports": "boolean"}[dataset]
        for item_id, english, questions, gold, rationale, choices in rows:
            for lang in LANGS:
                obj = {
                    "id": item_id, "dataset": dataset, "language": lang,
                    "question": questions[lang], "answer_type": answer_type, "gold": gold,
                    "english_question": english, "gold_rationale": rationale,
                }
                if choices:
                    obj["choices"] = [{"label": "ABCDE"[i], "text": t} for i, t in enumerate(choices)]
                out.append(obj)
    return out


def _wrong(item):
    if item.answer_type == "numeric":
        return item.gold.value + 1 + _roll(item.id) % 3
    if item.answer_type == "choice":
        labels = item.labels
        return labels[(labels.index(item.gold.label) + 1) % len(labels)]
    return "plausible" if not item.gold.plausible else "implausible"


def _answer_text(item, value, style):
    if item.answer_type == "numeric":
        forms = [f"{value}", f"The final numerical answer: {value}", f"The answer is ${value}.", f"**{value}**"]
    elif item.answer_type == "choice":
        text = dict(item.choices)[value]
        forms = [f"({value}) {text}", f"The answer is ({value}).", f"{value}", f"The final answer is ({value}) {text}"]
    else:
        forms = [value, f"The sentence is {value}.", f"{value.capitalize()}", f"Answer: {value}"]
    return forms[style % len(forms)]


def _degrade(english, roll):
    words = english.split()
    step = 3 + roll % 3
    return " ".join(w for i, w in enumerate(words) if i % step != step - 1)


def synth_response(item, strategy: PromptStrategy) -> str:
    roll = _roll(item.language, item.dataset, item.id, strategy.value)
    correct = roll % 100 < ACCURACY[strategy]
    gold = {"numeric": lambda g: g.value, "choice": lambda g: g.label,
            "boolean": lambda g: g.label}[item.answer_type](item.gold)
    value = gold if correct else _wrong(item)
    if item.answer_type == "numeric":
        value = format(value, "f") if not isinstance(value, int) else str(value)
    style = (roll >> 8) % 4
    lines = []
    if strategy.translates:
        good = strategy.uses_lexicon or (roll >> 12) % 2 == 0
        translation = item.english_question if good else _degrade(item.english_question, roll >> 16)
        label = "1. Translated English sentences: " if style == 1 else "1. "
        lines.append(label + translation)
    if strategy.reasons:
        reasoning = item.gold_rationale if correct else f"Looking at the numbers, I get {value}."
        lines.append("2. " + reasoning)
    header = "**3.**" if style == 3 else "3."
    lines.append(f"{header} {_answer_text(item, value, style)}")
    return "\n".join(lines)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "lexicons").mkdir(exist_ok=True)
    objs = item_objects()
    by_dataset = {}
    for obj in objs:
        by_dataset.setdefault(obj["dataset"], []).append(obj)
    for dataset, rows in by_dataset.items():
        with (OUT / f"{dataset}.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
            for obj in rows:
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")

    lexicons = {}
    for lang, table in LEXICONS.items():
        lex = Lexicon(lang, [LexiconEntry(src, gloss) for src, gloss in table.items()])
        lexicons[lang] = lex
        (OUT / "lexicons" / f"{lang}.jsonl").write_text(dump_lexicon(lex), encoding="utf-8")

    store = {}
    for obj in objs:
        item = item_from_json(obj)
        for strategy in PromptStrategy:
            lexicon = lexicons[item.language] if strategy.uses_lexicon else None
            prompt = build_prompt(strategy, item, lexicon)
            store[cache_key(PROVIDER_ID, PARAMS, prompt.text)] = synth_response(item, strategy)
    with (OUT / "replay_store.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(store):
            record = {"key": key, "raw_text": store[key], "provider_id": PROVIDER_ID,
                      "model": PARAMS.model, "timestamp": TIMESTAMP}
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    config = {
        "datasets": [f"{d}.jsonl" for d in ITEMS],
        "languages": list(LANGS),
        "lexicon_dir": "lexicons",
        "max_concurrency": 8,
        "seed": 0,
        "out_dir": "out",
        "provider": {
            "type": "replay",
            "id": PROVIDER_ID,
            "store": "replay_store.jsonl",
            "model": PARAMS.model,
            "temperature": PARAMS.temperature,
            "max_output_tokens": PARAMS.max_output_tokens,
        },
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    print(f"{len(objs)} items, {len(store)} replay records -> {OUT}")


if __name__ == "__main__":
    main()
