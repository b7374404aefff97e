//! Bundled stopword lists.
//!
//! The English list is the Snowball list plus the fragments that its
//! contractions leave behind once apostrophes split tokens (`doesn`, `isn`,
//! ...). Fragments that are also ordinary words (`can`, `won`, `let`) are
//! not added. The French list is the Snowball list.

use std::collections::HashSet;
use std::sync::OnceLock;

use super::Language;

const ENGLISH: &str = "
i me my myself we our ours ourselves you your yours yourself yourselves he him his
himself she her hers herself it its itself they them their theirs themselves what
which who whom this that these those am is are was were be been being have has had
having do does did doing would should could ought cannot a an the and but if or
because as until while of at by for with about against between into through during
before after above below to from up down in out on off over under again further then
once here there when where why how all any both each few more most other some such
no nor not only own same so than too very
isn aren wasn weren hasn haven hadn doesn don didn wouldn shan shouldn couldn mustn
";

const FRENCH: &str = "
au aux avec ce ces dans de des du elle en et eux il ils je la le les leur lui ma mais
me même mes moi mon ne nos notre nous on ou par pas pour qu que qui sa se ses son sur
ta te tes toi ton tu un une vos votre vous c d j l à m n s t y été étée étées étés
étant étante étants étantes suis es est sommes êtes sont serai seras sera serons serez
seront serais serait serions seriez seraient étais était étions étiez étaient fus fut
fûmes fûtes furent sois soit soyons soyez soient fusse fusses fût fussions fussiez
fussent ayant ayante ayantes ayants eu eue eues eus ai as avons avez ont aurai auras
aura aurons aurez auront aurais aurait aurions auriez auraient avais avait avions
aviez avaient eut eûmes eûtes eurent aie aies ait ayons ayez aient eusse eusses eût
eussions eussiez eussent
";

fn parse(list: &'static str) -> HashSet<&'static str> {
    list.split_whitespace().collect()
}

pub fn stopwords(language: Language) -> &'static HashSet<&'static str> {
    static EN: OnceLock<HashSet<&'static str>> = OnceLock::new();
    static FR: OnceLock<HashSet<&'static str>> = OnceLock::new();
    match language {
        Language::En => EN.get_or_init(|| parse(ENGLISH)),
        Language::Fr => FR.get_or_init(|| parse(FRENCH)),
    }
}

pub fn is_stopword(token: &str, language: Language) -> bool {
    stopwords(language).contains(token)
}
