#!/usr/bin/env python3
"""Offline generator for the bundled Mandarin lexicon and word lists.

Converts toneless pinyin syllables to broad IPA with standard initial/final
correspondences and emits:

  src/visemelab/data/lexicon_cmn.txt   word -> IPA phoneme sequence
  src/visemelab/data/words_cmn.txt     1000 labels, uniform sample count
  src/visemelab/data/words_en.txt      500 labels from the English lexicon

The runtime package never converts pinyin itself; these outputs are frozen.
Word labels are stored without syllable separators (one label = one lexicon
key), so the converter runs only here, where boundaries are still known.
"""

import random
import unicodedata
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "visemelab" / "data"

INITIALS = {
    "b": ["p"], "p": ["pʰ"], "m": ["m"], "f": ["f"],
    "d": ["t"], "t": ["tʰ"], "n": ["n"], "l": ["l"],
    "g": ["k"], "k": ["kʰ"], "h": ["x"],
    "j": ["tɕ"], "q": ["tɕʰ"], "x": ["ɕ"],
    "zh": ["tʂ"], "ch": ["tʂʰ"], "sh": ["ʂ"], "r": ["ɻ"],
    "z": ["ts"], "c": ["tsʰ"], "s": ["s"],
}

# Apical vowel of zhi/chi/shi/ri/zi/ci/si.
SIBILANTS = {"zh", "ch", "sh", "r", "z", "c", "s"}

FINALS = {
    "a": ["a"], "o": ["o"], "e": ["ɤ"], "ai": ["a", "i"], "ei": ["e", "i"],
    "ao": ["a", "u"], "ou": ["o", "u"], "an": ["a", "n"], "en": ["ə", "n"],
    "ang": ["a", "ŋ"], "eng": ["ə", "ŋ"], "ong": ["u", "ŋ"], "er": ["ɚ"],
    "i": ["i"], "ia": ["j", "a"], "ie": ["j", "e"], "iao": ["j", "a", "u"],
    "iu": ["j", "o", "u"], "ian": ["j", "ɛ", "n"], "in": ["i", "n"],
    "iang": ["j", "a", "ŋ"], "ing": ["i", "ŋ"], "iong": ["j", "u", "ŋ"],
    "u": ["u"], "ua": ["w", "a"], "uo": ["w", "o"], "uai": ["w", "a", "i"],
    "ui": ["w", "e", "i"], "uan": ["w", "a", "n"], "un": ["w", "ə", "n"],
    "uang": ["w", "a", "ŋ"], "ü": ["y"], "üe": ["ɥ", "e"],
    "üan": ["ɥ", "ɛ", "n"], "ün": ["y", "n"],
}

# Whole zero-initial syllables.
ZERO_INITIAL = {
    "a": ["a"], "o": ["o"], "e": ["ɤ"], "ai": ["a", "i"], "ei": ["e", "i"],
    "ao": ["a", "u"], "ou": ["o", "u"], "an": ["a", "n"], "en": ["ə", "n"],
    "ang": ["a", "ŋ"], "eng": ["ə", "ŋ"], "er": ["ɚ"],
    "yi": ["i"], "ya": ["j", "a"], "ye": ["j", "e"], "yao": ["j", "a", "u"],
    "you": ["j", "o", "u"], "yan": ["j", "ɛ", "n"], "yin": ["i", "n"],
    "yang": ["j", "a", "ŋ"], "ying": ["i", "ŋ"], "yong": ["j", "u", "ŋ"],
    "yu": ["y"], "yue": ["ɥ", "e"], "yuan": ["ɥ", "ɛ", "n"], "yun": ["y", "n"],
    "wu": ["u"], "wa": ["w", "a"], "wo": ["w", "o"], "wai": ["w", "a", "i"],
    "wei": ["w", "e", "i"], "wan": ["w", "a", "n"], "wen": ["w", "ə", "n"],
    "wang": ["w", "a", "ŋ"], "weng": ["w", "ə", "ŋ"],
}

# After j/q/x the written u is the front rounded vowel.
JQX_U = {"u": "ü", "ue": "üe", "uan": "üan", "un": "ün"}


def syllable_to_ipa(syl):
    syl = syl.lower().replace("v", "ü")
    if syl in ZERO_INITIAL:
        return list(ZERO_INITIAL[syl])
    initial = None
    for cand in ("zh", "ch", "sh"):
        if syl.startswith(cand):
            initial = cand
            break
    if initial is None and syl[0] in INITIALS:
        initial = syl[0]
    if initial is None:
        raise ValueError(f"cannot parse pinyin syllable {syl!r}")
    final = syl[len(initial):]
    if initial in {"j", "q", "x"} and final in JQX_U:
        final = JQX_U[final]
    if final == "i" and initial in SIBILANTS:
        return INITIALS[initial] + ["ɨ"]
    if final not in FINALS:
        raise ValueError(f"unknown final {final!r} in syllable {syl!r}")
    return INITIALS[initial] + list(FINALS[final])


SYLLABLES = """
a o e ai ei ao ou an en ang eng er
yi ya ye yao you yan yin yang ying yong yu yue yuan yun
wu wa wo wai wei wan wen wang weng
ba bo bai bei bao ban ben bang beng bi bie biao bian bin bing bu
pa po pai pei pao pou pan pen pang peng pi pie piao pian pin ping pu
ma mo me mai mei mao mou man men mang meng mi mie miao miu mian min ming mu
fa fo fei fou fan fen fang feng fu
da de dai dao dou dan dang deng dong di die diao diu dian ding du duo dui duan dun
ta te tai tao tou tan tang teng tong ti tie tiao tian ting tu tuo tui tuan tun
na ne nai nei nao nan nen nang neng nong ni nie niao niu nian nin niang ning nu nuo nuan nü nüe
la le lai lei lao lou lan lang leng long li lie liao liu lian lin liang ling lu luo luan lun lü lüe
ga ge gai gei gao gou gan gen gang geng gong gu gua guo guai gui guan gun guang
ka ke kai kao kou kan ken kang keng kong ku kua kuo kuai kui kuan kun kuang
ha he hai hei hao hou han hen hang heng hong hu hua huo huai hui huan hun huang
ji jia jie jiao jiu jian jin jiang jing jiong ju jue juan jun
qi qia qie qiao qiu qian qin qiang qing qiong qu que quan qun
xi xia xie xiao xiu xian xin xiang xing xiong xu xue xuan xun
zha zhe zhi zhai zhao zhou zhan zhen zhang zheng zhong zhu zhua zhuo zhuai zhui zhuan zhun zhuang
cha che chi chai chao chou chan chen chang cheng chong chu chuo chuai chui chuan chun chuang
sha she shi shai shao shou shan shen shang sheng shu shua shuo shuai shui shuan shun shuang
re ri rao rou ran ren rang reng rong ru ruo rui ruan run
za ze zi zai zei zao zou zan zen zang zeng zong zu zuo zui zuan zun
ca ce ci cai cao cou can cen cang ceng cong cu cuo cui cuan cun
sa se si sai sao sou san sen sang seng song su suo sui suan sun
""".split()

# Curated everyday words, '+' marking syllable boundaries.
WORDS = """
shi+jian xian+zai di+fang dong+xi yi+si ban+fa wen+hua jing+ji zheng+fu
guo+jia shi+jie she+hui qing+kuang bei+jing zhong+guo peng+you lao+shi
xue+sheng xue+xiao gong+zuo dian+hua dian+nao shou+ji qi+che huo+che
fei+ji ming+tian zuo+tian jin+tian xing+qi wen+ti ke+yi mei+you zhi+dao
jue+de xi+huan yin+wei suo+yi ran+hou xiang+xin jie+guo kai+shi jie+shu
li+kai hui+lai chu+qu jin+lai shang+ban xia+ban chi+fan he+shui shui+jiao
qi+chuang xi+zao chuan+yi zou+lu pao+bu you+yong da+qiu chang+ge tiao+wu
kan+shu xie+zi hua+hua ting+yin+yue kan+dian+ying wan+you+xi shang+wang
mai+cai zuo+fan xi+wan sao+di xi+yi+fu shang+dian yi+yuan yin+hang
gong+yuan fan+guan jiu+dian shu+dian you+ju che+zhan ji+chang ma+lu
qiao+liang da+lou fang+zi chu+fang wo+shi ke+ting xi+shou+jian chuang+hu
zhuo+zi yi+zi bei+zi pan+zi wan+kuai bi+ji+ben shou+biao yan+jing
mao+zi xie+zi+dai yi+fu ku+zi qun+zi wa+zi da+yi mao+yi chen+shan
tian+qi xia+yu gua+feng da+lei shan+dian cai+hong wen+du qi+wen
chun+tian xia+tian qiu+tian dong+tian zao+shang zhong+wu wan+shang
ban+ye shen+ye xiao+shi fen+zhong miao+zhong nian+ji sui+shu sheng+ri
jie+ri chun+jie guo+nian li+wu hong+bao jia+ren fu+mu ba+ba ma+ma
ge+ge jie+jie di+di mei+mei er+zi sun+zi ye+ye nai+nai shu+shu
a+yi biao+ge tang+mei qin+qi lin+ju tong+shi tong+xue lao+ban
jing+li yuan+gong gong+ren nong+min yi+sheng hu+shi jing+cha lü+shi
ji+zhe yan+yuan ge+shou hua+jia zuo+jia si+ji chu+shi fu+wu+yuan
shou+huo+yuan jun+ren xiao+fang+yuan yu+yan wen+zi han+zi pin+yin
yu+fa ju+zi dan+ci sheng+ci ke+wen zuo+ye kao+shi cheng+ji fen+shu
jiao+yu xue+wen zhi+shi ben+ling jing+yan neng+li shui+ping mu+biao
ji+hua jue+ding xuan+ze ji+hui wen+da tao+lun yan+jiu fa+xian fa+ming
chuang+zao gai+bian fa+zhan jin+bu ti+gao jiang+di zeng+jia jian+shao
kuo+da suo+xiao kai+fang guan+bi jian+she po+huai bao+hu wei+xian
an+quan jian+kang ji+bing gan+mao fa+shao ke+sou teng+tong yao+pian
zhi+liao xiu+xi yun+dong duan+lian shen+ti li+qi jing+shen xin+qing
gao+xing kuai+le nan+guo shang+xin sheng+qi hai+pa dan+xin fang+xin
xi+wang shi+wang meng+xiang li+xiang xing+fu xin+ku rong+yi kun+nan
jian+dan fu+za zhong+yao te+bie pu+tong zheng+chang qi+guai you+ming
nian+qing nian+lao gao+da ai+xiao pang+shou mei+li piao+liang ke+ai
cong+ming ben+dan qin+lao lan+duo yong+gan dan+xiao re+qing leng+dan
you+hao li+mao ke+qi zhen+cheng lao+shi+ren you+mo yan+su ren+zhen
ma+hu xi+xin cu+xin nai+xin ji+zao wen+rou cu+bao qian+xu jiao+ao
zi+xin zi+bei da+fang xiao+qi lang+fei jie+yue fu+you pin+qiong
quan+li yi+wu ze+ren zi+you ping+deng gong+ping zheng+yi fa+lü
gui+ding zhi+du zheng+ce fang+zhen lu+xian dao+lu fang+xiang mu+di
yuan+yin li+you jie+shi shuo+ming biao+shi dai+biao xiang+zheng
yi+yi jia+zhi zuo+yong ying+xiang xiao+guo cheng+guo shou+huo
sun+shi cuo+wu que+dian you+dian chang+chu duan+chu hao+chu huai+chu
li+yi hai+chu mao+dun chong+tu zheng+lun bi+sai jing+zheng he+zuo
tuan+jie fen+lie tong+yi fan+dui zan+cheng zhi+chi bang+zhu gu+li
an+wei pi+ping biao+yang cheng+zan ze+bei yuan+liang dao+qian gan+xie
huan+ying song+bie ying+jie bai+fang zuo+ke qing+ke song+li shou+li
jie+shao ren+shi liao+jie shu+xi mo+sheng qin+mi shu+yuan jin+zhang
fang+song ji+dong ping+jing re+nao an+jing xuan+hua ji+jing hua+ting
lü+xing lü+you can+guan you+lan feng+jing shan+shui hu+po da+hai
he+liu sen+lin cao+yuan sha+mo gao+yuan pen+di dao+yu ban+dao
qun+dao hai+wan hai+xia yun+hai ri+chu ri+luo yue+liang xing+xing
tai+yang di+qiu yu+zhou kong+qi yang+qi qi+ti ye+ti gu+ti wu+zhi
cai+liao jin+shu su+liao bo+li mu+tou shi+tou ni+tu sha+zi hui+chen
nü+ren nü+er nü+shi qu+nian qu+chu xu+yao xu+duo ju+hui qu+bie
jun+dui xun+lian yuan+lai yong+yuan que+ding yue+du jue+se quan+bu
lü+se lü+cha nü+wang yu+qi yu+mi yu+zhou+fei+chuan ju+li ju+da
qu+shi xu+ke jun+yun yun+shu yun+qi jue+xin que+shao yue+hui
""".split()


def build_cmn_entries():
    entries = {}
    order = []

    def add(label_sylls):
        key = "".join(label_sylls).upper()
        if key in entries:
            return
        ipa = []
        for s in label_sylls:
            ipa.extend(syllable_to_ipa(s))
        entries[key] = ipa
        order.append(key)

    for word in WORDS:
        add(word.split("+"))
    for syl in SYLLABLES:
        add([syl])

    rng = random.Random(20240601)
    frequent = [s for s in SYLLABLES if len(s) > 1]
    # Weighted padding keeps the labial/rhotic mouth shapes represented at
    # rates comparable to the English list instead of vanishing into the
    # long tail of the syllable inventory.
    boost = {"f": 22, "p": 18, "r": 26}
    def weight(s):
        if s.startswith(("zh", "ch", "sh")):
            return 0.25
        if s[0] in ("j", "q", "x"):
            return 1.6
        w = float(boost.get(s[0], 1))
        if s.startswith("w") or s.endswith(("u", "ou", "ao")):
            w *= 0.35
        return w
    weights = [weight(s) for s in frequent]
    while len(order) < 1000:
        a, b = rng.choices(frequent, weights=weights, k=2)
        add([a, b])
    return entries, order[:1000]


def main():
    entries, order = build_cmn_entries()
    lex_lines = [
        "# Mandarin lexicon: <pinyin-label> <ipa-phoneme> [<ipa-phoneme> ...]",
        "# Frozen offline from toneless-pinyin to broad-IPA correspondences.",
        "# Labels are whole words (syllables joined); tones carry no viseme",
        "# information and are never written here.",
    ]
    for key in order:
        lex_lines.append(key + " " + " ".join(entries[key]))
    (DATA / "lexicon_cmn.txt").write_text(
        unicodedata.normalize("NFC", "\n".join(lex_lines) + "\n"), encoding="utf-8"
    )

    word_lines = ["# Mandarin word list: <pinyin-label> <sample_count>"]
    word_lines += [f"{key} 4" for key in order]
    (DATA / "words_cmn.txt").write_text(
        unicodedata.normalize("NFC", "\n".join(word_lines) + "\n"), encoding="utf-8"
    )

    en_words = []
    for line in (DATA / "lexicon_en.txt").read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            en_words.append(line.split()[0])
    en_lines = ["# English word list: <word> <sample_count>"]
    en_lines += [f"{w} 8" for w in en_words]
    (DATA / "words_en.txt").write_text("\n".join(en_lines) + "\n", encoding="utf-8")

    print(f"cmn lexicon: {len(order)} entries; en word list: {len(en_words)} entries")


if __name__ == "__main__":
    main()
