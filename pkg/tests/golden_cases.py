"""Curated normalization pairs, each verified by hand against the rules.

Every rule group is covered: placeholder substitution (URLs, shortener
domains, emails, mentions), HTML markup and entities, line breaks,
character runs, emoji and symbol stripping, invisible format characters,
control characters, digit/Latin/bracket spacing, whitespace collapsing,
and the literal-placeholder fixed point. Expected outputs are byte-exact.
"""

# (input, expected_text, expected_replacement_count)
GOLDEN_CASES = [
    ("انظر https://t.co/xyz", "انظر [url]", 1),
    ("www.example.com/page hello", "[url] hello", 1),
    ("شاهد t.co/abc123 الآن", "شاهد [url] الآن", 1),
    ("راسلنا على info@site.org شكرا", "راسلنا على [email] شكرا", 1),
    ("@user_1 مرحبا", "[user] مرحبا", 1),
    ("@a hi @b http://x.io/y mail me a@b.co",
     "[user] hi [user] [url] mail me [email]", 4),
    ("<b>نص</b> عادي", "نص عادي", 0),
    ("a &amp; b &lt;tag&gt;", "a & b", 0),
    ("سطر اول\nسطر ثاني\r\nثالث", "سطر اول سطر ثاني ثالث", 0),
    ("رائعععع", "رائعع", 0),
    ("greaaaat news", "greaat news", 0),
    ("مضحك \U0001F602\U0001F602 جدا", "مضحك جدا", 0),
    ("نجمة ✨ وسهم → نهاية", "نجمة وسهم نهاية", 0),
    ("كلمة​وصلة‏أخرى", "كلمةوصلةأخرى", 0),
    ("عام2020وبعدها", "عام 2020 وبعدها", 0),
    ("كلمة(نص)كلمة", "كلمة ( نص ) كلمة", 0),
    ("كلمةabcكلمة", "كلمة abc كلمة", 0),
    ("a   b\t\tc", "a b c", 0),
    ("", "", 0),
    ("النص [url] موجود", "النص [url] موجود", 0),
    ("يقول @x إن https://ex.am/1 رائععع \U0001F44D <i>جدا</i>",
     "يقول [user] إن [url] رائعع جدا", 2),
    ("قبل\x0bبعد\x07نهاية", "قبل بعدنهاية", 0),
    ("قائمة [بند] نهاية", "قائمة [ بند ] نهاية", 0),
    ("abc123def", "abc 123 def", 0),
    ("ااالله", "االله", 0),
    ("هاشتاج #قضية مهم", "هاشتاج #قضية مهم", 0),
]
