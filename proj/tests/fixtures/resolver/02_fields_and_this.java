package fixtures.fields;

import com.google.gson.Gson;
import com.google.gson.GsonBuilder;

public class Fields {
    private final Gson gson;
    private final StringBuilder log = new StringBuilder();

    public Fields() {
        this.gson = new GsonBuilder() //@use com.google.gson.GsonBuilder.<init>/0
            .serializeNulls() //@use com.google.gson.GsonBuilder.serializeNulls/0
            .create(); //@use com.google.gson.GsonBuilder.create/0
    }

    public String write(Object o) {
        log.append("write");
        return this.gson.toJson(o); //@use com.google.gson.Gson.toJson/1
    }

    public <T> T read(String s, Class<T> type) {
        return gson.fromJson(s, type); //@use com.google.gson.Gson.fromJson/2
    }
}
