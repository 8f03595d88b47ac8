//! Scripted histories covering each change type, block migration and
//! refactoring-driven move the tracker must see through.

use super::{java, Scenario};

pub const SVC: &str = "src/main/java/app/Svc.java";
const README: &str = "README.md";

pub const RUN: &str = "    public void run(int n) {
        prepare();
        if (n > 0) {
            log(n);
            send(n);
        }
        finish();
    }";

pub const HELPER: &str = "    public int helper() {
        return 1;
    }";

fn svc(members: &[&str]) -> String {
    java("app", "public class Svc", members)
}

fn readme(s: &mut Scenario) -> usize {
    s.script.commit("init", |b| {
        b.write(README, "demo\n");
    })
}

/// Body and expression edits, plus commits the block survives untouched.
pub fn edits() -> Scenario {
    let mut s = Scenario::new("edits", SVC, "if", "if (n >= 1)");
    readme(&mut s);
    let intro = s.script.commit("add service", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    s.script.commit("tweak helper", |b| {
        b.replace(SVC, "return 1;", "return 2;");
    });
    s.script.commit("tweak run", |b| {
        b.replace(SVC, "prepare();", "prepare(n);");
    });
    let cond = s.script.commit("stricter", |b| {
        b.replace(SVC, "if (n > 0)", "if (n > 1)");
    });
    let body = s.script.commit("send flag", |b| {
        b.replace(SVC, "send(n);", "send(n, true);");
    });
    let both = s.script.commit("both", |b| {
        b.replace(SVC, "if (n > 1)", "if (n >= 1)");
        b.replace(SVC, "log(n);", "log(n, 1);");
    });
    s.expect(both, &["expression-change", "body-change"])
        .expect(body, &["body-change"])
        .expect(cond, &["expression-change"])
        .expect(intro, &["introduced"])
}

/// A block added to a method that already existed.
pub fn added_to_existing_method() -> Scenario {
    let mut s = Scenario::new("added-to-method", SVC, "while", "while (n > 3)");
    readme(&mut s);
    s.script.commit("add service", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    let intro = s.script.commit("loop", |b| {
        b.replace(SVC, "        finish();", "        while (n > 3) {\n            n = n / 2;\n        }\n        finish();");
    });
    let edit = s.script.commit("loop body", |b| {
        b.replace(SVC, "n = n / 2;", "n = n / 3;");
    });
    s.expect(edit, &["body-change"]).expect(intro, &["introduced"])
}

const LOAD: &str = "    public void load(String path) {
        open(path);
        try {
            read(path);
        } catch (IOException e) {
            log(e);
        }
        close();
    }";

/// Every catch/finally change on a try that exists since the first commit.
pub fn try_clauses() -> Scenario {
    let mut s = Scenario::new("try-clauses", SVC, "try", "try {");
    s.root = true;
    let root = s.script.commit("service", |b| {
        b.write(SVC, svc(&[LOAD, HELPER]));
    });
    let c_add = s.script.commit("catch runtime", |b| {
        b.replace(
            SVC,
            "            log(e);\n        }",
            "            log(e);\n        } catch (RuntimeException e) {\n            fail(e);\n        }",
        );
    });
    let c_change = s.script.commit("warn", |b| {
        b.replace(SVC, "log(e);", "warn(e);");
    });
    let f_add = s.script.commit("finally", |b| {
        b.replace(
            SVC,
            "            fail(e);\n        }",
            "            fail(e);\n        } finally {\n            release();\n        }",
        );
    });
    let f_change = s.script.commit("release path", |b| {
        b.replace(SVC, "release();", "release(path);");
    });
    let f_remove = s.script.commit("no finally", |b| {
        b.replace(SVC, " finally {\n            release(path);\n        }", "");
    });
    let c_remove = s.script.commit("no runtime catch", |b| {
        b.replace(SVC, " catch (RuntimeException e) {\n            fail(e);\n        }", "");
    });
    let body = s.script.commit("read flag", |b| {
        b.replace(SVC, "read(path);", "read(path, true);");
    });
    s.expect(body, &["body-change"])
        .expect(c_remove, &["catch-block-removed"])
        .expect(f_remove, &["finally-block-removed"])
        .expect(f_change, &["finally-block-change"])
        .expect(f_add, &["finally-block-added"])
        .expect(c_change, &["catch-block-change"])
        .expect(c_add, &["catch-block-added"])
        .expect(root, &[])
}

/// A catch clause tracked on its own.
pub fn catch_edits() -> Scenario {
    let mut s = Scenario::new("catch-edits", SVC, "catch", "catch (Exception e)");
    readme(&mut s);
    let intro = s.script.commit("service", |b| {
        b.write(SVC, svc(&[LOAD, HELPER]));
    });
    let body = s.script.commit("warn", |b| {
        b.replace(SVC, "log(e);", "warn(e);");
    });
    let expr = s.script.commit("widen", |b| {
        b.replace(SVC, "catch (IOException e)", "catch (Exception e)");
    });
    s.expect(expr, &["expression-change"])
        .expect(body, &["body-change"])
        .expect(intro, &["introduced"])
}

fn process(block: &str) -> String {
    format!(
        "    public void process(List<String> items, Iterator<String> it, int k, Object lock) {{
        start();
{block}
        end();
    }}"
    )
}

/// `before` is replaced by `after` in one commit; `tag` is the only change.
fn migration(name: &str, kind: &str, needle: &str, before: &str, after: &str, tag: &str) -> Scenario {
    let mut s = Scenario::new(name, SVC, kind, needle);
    readme(&mut s);
    let intro = s.script.commit("process", |b| {
        b.write(SVC, svc(&[&process(before), HELPER]));
    });
    let mig = s.script.commit("rewrite", |b| {
        b.replace(SVC, before, after);
    });
    s.script.commit("noise", |b| {
        b.replace(SVC, "return 1;", "return 3;");
    });
    s.expect(mig, &[tag]).expect(intro, &["introduced"])
}

pub fn migrations() -> Vec<Scenario> {
    vec![
        migration(
            "if-else-if-to-switch",
            "switch",
            "switch (k)",
            "        if (k == 1) {
            one();
        } else if (k == 2) {
            two();
        } else {
            other();
        }",
            "        switch (k) {
            case 1:
                one();
                break;
            case 2:
                two();
                break;
            default:
                other();
        }",
            "block-type-migration(if-else-if-to-switch)",
        ),
        migration(
            "switch-to-if-else-if",
            "if",
            "if (k == 1)",
            "        switch (k) {
            case 1:
                one();
                break;
            case 2:
                two();
                break;
            default:
                other();
        }",
            "        if (k == 1) {
            one();
        } else if (k == 2) {
            two();
        } else {
            other();
        }",
            "block-type-migration(switch-to-if-else-if)",
        ),
        migration(
            "if-to-while",
            "while",
            "while (k > 0)",
            "        if (k > 0) {
            k = drain(k);
        }",
            "        while (k > 0) {
            k = drain(k);
        }",
            "block-type-migration(if-to-while)",
        ),
        migration(
            "iterator-while-to-enhanced-for",
            "enhanced-for",
            "for (String s : items)",
            "        while (it.hasNext()) {
            String s = it.next();
            consume(s);
        }",
            "        for (String s : items) {
            consume(s);
        }",
            "block-type-migration(iterator-while-to-enhanced-for)",
        ),
        migration(
            "for-to-while",
            "while",
            "while (i < k)",
            "        for (int i = 0; i < k; i++) {
            emit(i);
        }",
            "        int i = 0;
        while (i < k) {
            emit(i);
            i++;
        }",
            "block-type-migration(for-to-while)",
        ),
        migration(
            "loop-to-pipeline",
            "pipeline",
            "items.forEach",
            "        for (String s : items) {
            consume(s);
        }",
            "        items.forEach(s -> consume(s));",
            "replace-loop-with-pipeline",
        ),
        migration(
            "pipeline-to-loop",
            "enhanced-for",
            "for (String s : items)",
            "        items.stream().filter(s -> s != null).forEach(s -> consume(s));",
            "        for (String s : items) {
            if (s != null) {
                consume(s);
            }
        }",
            "replace-pipeline-with-loop",
        ),
        migration(
            "for-to-if",
            "if",
            "if (k > 0)",
            "        for (int j = 0; j < k; j++) {
            flush();
            break;
        }",
            "        if (k > 0) {
            flush();
        }",
            "block-type-migration(for-to-if)",
        ),
        migration(
            "try-to-try-with-resources",
            "try",
            "try (Reader r",
            "        Reader r = open();
        try {
            r.read();
        } finally {
            r.close();
        }",
            "        try (Reader r = open()) {
            r.read();
        }",
            "block-type-migration(try-to-try-with-resources)",
        ),
        migration(
            "try-to-synchronized",
            "synchronized",
            "synchronized (lock)",
            "        guard.lock();
        try {
            k++;
        } finally {
            guard.unlock();
        }",
            "        synchronized (lock) {
            k++;
        }",
            "block-type-migration(try-to-synchronized)",
        ),
        migration(
            "catch-to-finally",
            "finally",
            "} finally {",
            "        try {
            work(k);
        } catch (IllegalStateException e) {
            cleanup();
        }",
            "        try {
            work(k);
        } finally {
            cleanup();
        }",
            "block-type-migration(catch-to-finally)",
        ),
    ]
}

/// Refactorings inside one method body.
pub fn body_refactorings() -> Vec<Scenario> {
    let split_outer = {
        let mut s = migration(
            "split-conditional-outer",
            "if",
            "if (k > 0) {",
            "        if (k > 0 && ready()) {
            fire(k);
        }",
            "        if (k > 0) {
            if (ready()) {
                fire(k);
            }
        }",
            "block-split",
        );
        s.name = "split-conditional-outer".into();
        s
    };
    let split_inner = {
        let mut s = Scenario::new("split-conditional-inner", SVC, "if", "if (ready())");
        s.script = split_outer.script.clone();
        s.expected = split_outer.expected.clone();
        s
    };
    let merge = migration(
        "merge-conditional",
        "if",
        "if (k < 0 || k > 9)",
        "        if (k < 0) {
            reject(k);
        }
        if (k > 9) {
            reject(k);
        }",
        "        if (k < 0 || k > 9) {
            reject(k);
        }",
        "block-merge",
    );
    let merge_catch = migration(
        "merge-catch",
        "catch",
        "catch (IOException | SQLException e)",
        "        try {
            query(k);
        } catch (IOException e) {
            report(e);
        } catch (SQLException e) {
            report(e);
        }",
        "        try {
            query(k);
        } catch (IOException | SQLException e) {
            report(e);
        }",
        "block-merge",
    );
    let split_catch = migration(
        "split-catch",
        "catch",
        "catch (SQLException e)",
        "        try {
            query(k);
        } catch (IOException | SQLException e) {
            report(e);
        }",
        "        try {
            query(k);
        } catch (IOException e) {
            report(e);
        } catch (SQLException e) {
            report(e);
        }",
        "block-split",
    );
    let mut invert = Scenario::new("invert-condition", SVC, "if", "if (k <= 0)");
    readme(&mut invert);
    let intro = invert.script.commit("process", |b| {
        b.write(
            SVC,
            svc(&[
                &process("        if (k > 0) {\n            up(k);\n        } else {\n            down(k);\n        }"),
                HELPER,
            ]),
        );
    });
    let inv = invert.script.commit("invert", |b| {
        b.replace(
            SVC,
            "        if (k > 0) {\n            up(k);\n        } else {\n            down(k);\n        }",
            "        if (k <= 0) {\n            down(k);\n        } else {\n            up(k);\n        }",
        );
    });
    let invert = invert
        .expect(inv, &["expression-change", "body-change"])
        .expect(intro, &["introduced"]);
    vec![split_outer, split_inner, merge, merge_catch, split_catch, invert]
}

const RUN_LONG: &str = "    public void run(int n) {
        prepare();
        int total = n * 2;
        if (n > 0) {
            log(n);
            send(n);
        }
        finish(total);
    }";

/// Method-level refactorings in one file.
pub fn method_refactorings() -> Vec<Scenario> {
    let mut out = Vec::new();

    let mut s = Scenario::new("rename-method", SVC, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    s.script.commit("rename", |b| {
        b.replace(SVC, "public void run(int n)", "public void execute(long n)");
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(SVC, "send(n);", "send(n, 1);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    let mut s = Scenario::new("rename-and-edit", SVC, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    let both = s.script.commit("rename and edit", |b| {
        b.replace(SVC, "public void run(int n)", "public void runAll(int n, boolean f)");
        b.replace(SVC, "log(n);", "log(n, f);");
    });
    out.push(s.expect(both, &["body-change"]).expect(intro, &["introduced"]));

    let extracted = "    public void run(int n) {
        prepare();
        int total = n * 2;
        emit(n);
        finish(total);
    }

    private void emit(int n) {
        if (n > 0) {
            log(n);
            send(n);
        }
    }";
    let mut s = Scenario::new("extract-method", SVC, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN_LONG, HELPER]));
    });
    s.script.commit("extract", |b| {
        b.replace(SVC, RUN_LONG, extracted);
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(SVC, "send(n);", "send(n, 1);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    let mut s = Scenario::new("extract-and-edit", SVC, "if", "if (n > 10)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN_LONG, HELPER]));
    });
    let ext = s.script.commit("extract", |b| {
        b.replace(SVC, RUN_LONG, &extracted.replace("if (n > 0)", "if (n > 10)"));
    });
    out.push(s.expect(ext, &["expression-change"]).expect(intro, &["introduced"]));

    let mut s = Scenario::new("inline-method", SVC, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[extracted, HELPER]));
    });
    s.script.commit("inline", |b| {
        b.replace(SVC, extracted, RUN_LONG);
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(SVC, "log(n);", "trace(n);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    // the same block in two methods is extracted into one helper
    let dup_a = "    public void first(int x) {
        begin();
        if (x > limit) {
            warn(x);
            reset();
        }
        one(x);
    }";
    let dup_b = "    public void second(int x) {
        other();
        if (x > limit) {
            warn(x);
            reset();
        }
        two(x);
    }";
    let mut s = Scenario::new("duplicate-extraction", SVC, "if", "if (x > limit)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[dup_a, dup_b, HELPER]));
    });
    let ext = s.script.commit("dedupe", |b| {
        b.replace(SVC, dup_a, &dup_a.replace("        if (x > limit) {\n            warn(x);\n            reset();\n        }", "        check(x);"));
        b.replace(SVC, dup_b, &format!(
            "{}\n\n    private void check(int x) {{\n        if (x > limit) {{\n            warn(x);\n            reset();\n        }}\n    }}",
            dup_b.replace("        if (x > limit) {\n            warn(x);\n            reset();\n        }", "        check(x);")
        ));
    });
    out.push(s.expect(ext, &["block-merge"]).expect(intro, &["introduced"]));

    // two methods merged into one
    let a = "    public void alpha(int x) {
        if (x > 1) {
            one(x);
        }
        done();
    }";
    let b2 = "    public void beta(int y) {
        for (int i = 0; i < y; i++) {
            two(i);
        }
        done();
    }";
    let merged = "    public void both(int x, int y) {
        if (x > 1) {
            one(x);
        }
        for (int i = 0; i < y; i++) {
            two(i);
        }
        done();
    }";
    let mut s = Scenario::new("merge-methods", SVC, "for", "for (int i = 0; i < y; i++)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[a, b2, HELPER]));
    });
    s.script.commit("merge", |b| {
        b.write(SVC, svc(&[merged, HELPER]));
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(SVC, "two(i);", "two(i, y);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    let mut s = Scenario::new("split-method", SVC, "for", "for (int i = 0; i < y; i++)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[merged, HELPER]));
    });
    s.script.commit("split", |b| {
        b.write(SVC, svc(&[a, b2, HELPER]));
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(SVC, "two(i);", "two(i, y);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    out
}

pub const UTIL: &str = "src/main/java/app/Util.java";
const BASE: &str = "src/main/java/app/Base.java";
const SUB: &str = "src/main/java/app/Sub.java";

/// Moves across files and classes.
pub fn cross_file() -> Vec<Scenario> {
    let mut out = Vec::new();

    let moved = "src/main/java/core/Svc.java";
    let mut s = Scenario::new("move-file", moved, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    s.script.commit("move", |b| {
        b.rename(SVC, moved);
        b.replace(moved, "package app;", "package core;");
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(moved, "send(n);", "send(n, 1);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    let renamed = "src/main/java/app/Service.java";
    let mut s = Scenario::new("rename-class", renamed, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    let both = s.script.commit("rename", |b| {
        b.rename(SVC, renamed);
        b.replace(renamed, "public class Svc", "public class Service");
        b.replace(renamed, "log(n);", "log(n, 0);");
    });
    out.push(s.expect(both, &["body-change"]).expect(intro, &["introduced"]));

    let util_empty = java("app", "public class Util", &[HELPER]);
    let mut s = Scenario::new("move-method", UTIL, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, "    public int size() {\n        return 0;\n    }"]));
        b.write(UTIL, util_empty.clone());
    });
    let mv = s.script.commit("move method", |b| {
        b.write(SVC, svc(&["    public int size() {\n        return 0;\n    }"]));
        b.write(UTIL, java("app", "public class Util", &[HELPER, &RUN.replace("send(n);", "send(n + 1);")]));
    });
    out.push(s.expect(mv, &["body-change"]).expect(intro, &["introduced"]));

    let work = "    public void work(int v) {
        while (v > 0) {
            v = step(v);
        }
    }";
    let other = "    public void other() {
        idle();
    }";
    let mut s = Scenario::new("pull-up", BASE, "while", "while (v > 0)");
    readme(&mut s);
    let intro = s.script.commit("hierarchy", |b| {
        b.write(BASE, java("app", "public class Base", &[other]));
        b.write(SUB, java("app", "public class Sub extends Base", &[work, HELPER]));
    });
    s.script.commit("pull up", |b| {
        b.write(BASE, java("app", "public class Base", &[other, work]));
        b.write(SUB, java("app", "public class Sub extends Base", &[HELPER]));
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(BASE, "v = step(v);", "v = step(v, 2);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    let mut s = Scenario::new("push-down", SUB, "while", "while (v > 1)");
    readme(&mut s);
    let intro = s.script.commit("hierarchy", |b| {
        b.write(BASE, java("app", "public class Base", &[other, work]));
        b.write(SUB, java("app", "public class Sub extends Base", &[HELPER]));
    });
    let down = s.script.commit("push down", |b| {
        b.write(BASE, java("app", "public class Base", &[other]));
        b.write(SUB, java("app", "public class Sub extends Base", &[&work.replace("while (v > 0)", "while (v > 1)"), HELPER]));
    });
    out.push(s.expect(down, &["expression-change"]).expect(intro, &["introduced"]));

    let run_util = "    public void run(Util u, int v) {
        start();
        while (v > 0) {
            v = step(v);
        }
        stop();
    }";
    let mut s = Scenario::new("extract-and-move", UTIL, "while", "while (v > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[run_util]));
        b.write(UTIL, util_empty.clone());
    });
    s.script.commit("extract and move", |b| {
        b.write(SVC, svc(&["    public void run(Util u, int v) {\n        start();\n        u.drain(v);\n        stop();\n    }"]));
        b.write(
            UTIL,
            java("app", "public class Util", &[HELPER, "    public void drain(int v) {\n        while (v > 0) {\n            v = step(v);\n        }\n    }"]),
        );
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(UTIL, "v = step(v);", "v = next(v);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    // a class carved out of another one
    let tools = "src/main/java/app/Tools.java";
    let mut s = Scenario::new("extract-class", tools, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, HELPER]));
    });
    s.script.commit("extract class", |b| {
        b.write(SVC, svc(&["    public int helper() {\n        return new Tools().count();\n    }"]));
        b.write(tools, java("app", "public class Tools", &[RUN, "    public int count() {\n        return 1;\n    }"]));
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(tools, "log(n);", "log(n, 2);");
    });
    out.push(s.expect(edit, &["body-change"]).expect(intro, &["introduced"]));

    out
}

/// Extract method, then rename the class, then move the file; the block
/// also changes in each of those commits.
pub fn chain() -> Scenario {
    let fin = "src/main/java/core/Service.java";
    let mut s = Scenario::new("chain", fin, "if", "if (n > 3)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN_LONG, HELPER]));
    });
    let ext = s.script.commit("extract", |b| {
        b.replace(
            SVC,
            RUN_LONG,
            "    public void run(int n) {
        prepare();
        int total = n * 2;
        emit(n);
        finish(total);
    }

    private void emit(int n) {
        if (n > 1) {
            log(n);
            send(n);
        }
    }",
        );
    });
    let ren = "src/main/java/app/Service.java";
    let renamed = s.script.commit("rename class", |b| {
        b.rename(SVC, ren);
        b.replace(ren, "public class Svc", "public class Service");
        b.replace(ren, "if (n > 1)", "if (n > 2)");
    });
    let moved = s.script.commit("move file", |b| {
        b.rename(ren, fin);
        b.replace(fin, "package app;", "package core;");
        b.replace(fin, "if (n > 2)", "if (n > 3)");
    });
    s.expect(moved, &["expression-change"])
        .expect(renamed, &["expression-change"])
        .expect(ext, &["expression-change"])
        .expect(intro, &["introduced"])
}

/// Methods reordered in one commit: line-range tools lose the block there.
pub fn reorder() -> Scenario {
    let a = "    public void a() {\n        alpha();\n        alpha2();\n    }";
    let b2 = "    public void b() {\n        beta();\n        beta2();\n    }";
    let mut s = Scenario::new("reorder", SVC, "if", "if (n > 0)");
    readme(&mut s);
    let intro = s.script.commit("svc", |b| {
        b.write(SVC, svc(&[RUN, a, b2, HELPER]));
    });
    let edit = s.script.commit("edit", |b| {
        b.replace(SVC, "log(n);", "log(n, 1);");
    });
    s.script.commit("reorder", |b| {
        b.write(SVC, svc(&[a, b2, HELPER, &RUN.replace("log(n);", "log(n, 1);")]));
    });
    let last = s.script.commit("edit again", |b| {
        b.replace(SVC, "send(n);", "send(n, 9);");
    });
    s.expect(last, &["body-change"])
        .expect(edit, &["body-change"])
        .expect(intro, &["introduced"])
}

pub fn all() -> Vec<Scenario> {
    let mut v = vec![edits(), added_to_existing_method(), try_clauses(), catch_edits(), chain(), reorder()];
    v.extend(migrations());
    v.extend(body_refactorings());
    v.extend(method_refactorings());
    v.extend(cross_file());
    v
}
